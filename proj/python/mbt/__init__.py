# Copyright 2026 The MBT Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Multi-modal player trajectory prediction."""

from mbt._core import (
    DEFAULT_DT,
    CommandError,
    DataQualityError,
    __version__,
    acceleration_profile,
    ade_fde,
    best_of_m,
    build_dataset,
    calibration_bin,
    distance,
    epsilon_at_epoch,
    evaluate,
    mse_loss,
    mtp_loss,
    parameter_count,
    percentile,
    relaxed_delta,
    synth,
    train,
    winning_mode,
)

__all__ = [
    "DEFAULT_DT",
    "CommandError",
    "DataQualityError",
    "__version__",
    "acceleration_profile",
    "ade_fde",
    "best_of_m",
    "build_dataset",
    "calibration_bin",
    "distance",
    "epsilon_at_epoch",
    "evaluate",
    "mse_loss",
    "mtp_loss",
    "parameter_count",
    "percentile",
    "relaxed_delta",
    "synth",
    "train",
    "winning_mode",
]
