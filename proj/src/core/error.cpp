// SPDX-License-Identifier: Apache-2.0
//
// fsanm - frequency-selective atomic norm channel estimation
// Copyright (C) 2026 fsanm developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "core/error.hpp"

namespace fsanm
{
    const char *error_code_name(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::invalid_argument:
            return "invalid argument";
        case ErrorCode::dimension_mismatch:
            return "dimension mismatch";
        case ErrorCode::not_converged:
            return "solver did not converge";
        case ErrorCode::model_order:
            return "model order inconsistent";
        case ErrorCode::io:
            return "i/o failure";
        case ErrorCode::aborted:
            return "run aborted";
        case ErrorCode::infeasible:
            return "infeasible request";
        }
        return "unknown error";
    }
}
