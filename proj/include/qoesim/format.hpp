/*
 * Copyright 2026 The qoesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QOESIM_FORMAT_HPP
#define QOESIM_FORMAT_HPP

#include <cstdio>
#include <string>

namespace qoesim {

/// One shared float format for every emitted file, so that identical
/// runs produce byte-identical output.
inline std::string formatG(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

}  // namespace qoesim

#endif  // QOESIM_FORMAT_HPP
