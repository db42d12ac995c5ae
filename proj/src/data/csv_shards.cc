// Copyright 2026 The Fedring Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <system_error>

#include "fedring/data_synth.h"
#include "fedring/errors.h"

namespace fedring::data {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseNumber(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError(line_no, "'" + std::string(field) + "' is not a number");
  }
  return value;
}

}  // namespace

std::vector<DatasetShard> LoadShards(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open shard file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SchemaError("shard file is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitFields(line);
  if (header.size() < 3 || header[0] != "user_id" || header[1] != "target") {
    throw SchemaError("header must be user_id,target,f0,...");
  }
  for (std::size_t j = 2; j < header.size(); ++j) {
    if (header[j] != "f" + std::to_string(j - 2)) {
      throw SchemaError("header column " + std::to_string(j + 1) +
                        " should be f" + std::to_string(j - 2));
    }
  }
  const std::size_t width = header.size() - 2;

  struct Pending {
    std::vector<double> inputs;
    std::vector<double> targets;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> by_user;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                    " fields, found " +
                                    std::to_string(fields.size()));
    }
    const std::string user(fields[0]);
    if (user.empty()) throw ParseError(line_no, "empty user_id");
    auto [it, inserted] = by_user.try_emplace(user);
    if (inserted) order.push_back(user);
    it->second.targets.push_back(ParseNumber(fields[1], line_no));
    for (std::size_t j = 2; j < fields.size(); ++j) {
      it->second.inputs.push_back(ParseNumber(fields[j], line_no));
    }
  }
  if (order.empty()) throw SchemaError("shard file has no samples");

  std::vector<DatasetShard> shards;
  for (const auto& user : order) {
    auto& p = by_user[user];
    const auto rows = static_cast<Eigen::Index>(p.targets.size());
    RowMatrix x = Eigen::Map<RowMatrix>(p.inputs.data(), rows,
                                        static_cast<Eigen::Index>(width));
    Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(p.targets.data(), rows);
    shards.emplace_back(std::move(x), std::move(t), user);
  }
  return shards;
}

void WriteShards(const std::filesystem::path& path,
                 std::span<const DatasetShard> shards) {
  if (shards.empty()) throw SchemaError("no shards to write");
  const std::size_t width = shards.front().feature_dim();
  std::ofstream out(path, std::ios::binary);
  out << "user_id,target";
  for (std::size_t j = 0; j < width; ++j) out << ",f" << j;
  out << '\n';
  auto put = [&out](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  for (const auto& s : shards) {
    if (s.feature_dim() != width) {
      throw SchemaError("shards disagree on feature dimension");
    }
    for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
      out << s.user_id << ',';
      put(s.targets[i]);
      for (Eigen::Index j = 0; j < s.inputs.cols(); ++j) {
        out << ',';
        put(s.inputs(i, j));
      }
      out << '\n';
    }
  }
  if (!out) throw SchemaError("failed writing " + path.string());
}

}  // namespace fedring::data
