// Copyright 2026 The ddoslab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>

#include "flowdata/flow_table.hpp"
#include "flowdata/schema.hpp"

namespace ddoslab::flowdata {

// Reads a raw NetFlow CSV. Feature cells that fail to parse drop the row
// (counted under "excluded_unparseable"); empty cells and "nan" become NaN and
// are left for clean(). Drop columns are carried along numerically when they
// parse and as NaN otherwise (addresses, identifiers).
FlowTable load_csv(const std::filesystem::path& path, const FlowSchema& schema);

// Processed-table CSV: header is the column names followed by "label";
// labels are written as benign/ddos and values in shortest round-trip form.
void write_table_csv(const FlowTable& table, const std::filesystem::path& path);
FlowTable read_table_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ddoslab::flowdata
