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

#ifndef FSANM_CORE_ERROR_HPP
#define FSANM_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fsanm
{
    // Numeric values are shared with the C API status codes.
    enum class ErrorCode : int
    {
        invalid_argument = 1,
        dimension_mismatch = 2,
        not_converged = 3,
        model_order = 4,
        io = 5,
        aborted = 6,
        infeasible = 7,
    };

    const char *error_code_name(ErrorCode code);

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    [[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

    inline void require(bool condition, ErrorCode code, const std::string &what)
    {
        if (!condition)
            throw Error(code, what);
    }
}

#endif
