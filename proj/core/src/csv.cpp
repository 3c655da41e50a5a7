/*
 Copyright 2026 The clmatch Authors

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

#include "clmatch/csv.hpp"

#include <cstdio>
#include <ostream>

namespace clmatch::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_header_block(std::ostream &os,
                        const std::vector<std::pair<std::string, std::string>> &entries) {
    for (const auto &[key, value] : entries) {
        os << "# " << key << " = " << value << '\n';
    }
}

void write_row(std::ostream &os, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            os << ',';
        }
        os << fields[i];
    }
    os << '\n';
}

void write_row(std::ostream &os, const std::vector<double> &values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            os << ',';
        }
        os << format_double(values[i]);
    }
    os << '\n';
}

} // namespace clmatch::csv
