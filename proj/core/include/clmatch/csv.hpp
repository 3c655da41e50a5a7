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

#ifndef CLMATCH_CSV_HPP
#define CLMATCH_CSV_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace clmatch::csv {

/// Shortest-safe decimal form: 17 significant digits, '.' separator.
std::string format_double(double v);

/// Writes "# key = value" lines. Every CSV artifact starts with one of these blocks.
void write_header_block(std::ostream &os,
                        const std::vector<std::pair<std::string, std::string>> &entries);

/// Writes one comma-separated record terminated by LF.
void write_row(std::ostream &os, const std::vector<std::string> &fields);
void write_row(std::ostream &os, const std::vector<double> &values);

} // namespace clmatch::csv

#endif // CLMATCH_CSV_HPP
