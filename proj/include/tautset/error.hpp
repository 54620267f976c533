/*
 Copyright 2026 The tautset Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef TAUTSET_ERROR_HPP
#define TAUTSET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tautset {

enum class ErrorCode {
    InvalidArgument,
    Config,
    EmptyControlSet,
    SingularMultiplier,
    SymmetryValidationFailed,
    SpuriousRootFound,
    VerificationFailed,
    StepFailure,
    StitchGap,
    WindowExceeded,
    OracleDisagreement,
    Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the C API maps it onto status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tautset

#endif  // TAUTSET_ERROR_HPP
