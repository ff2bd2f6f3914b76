// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License.  You may obtain a copy
// of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  See the
// License for the specific language governing permissions and limitations
// under the License.
#include "fbe/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fbe/errors.hpp"

namespace fbe {

namespace {

constexpr char kMagic[8] = {'F', 'B', 'E', 'C', 'K', 'P', 'T', '1'};

template <class T>
void put(std::string& buf, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  buf.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T take(const std::string& buf, size_t& pos) {
  if (pos + sizeof(T) > buf.size()) fail(ErrorKind::Format, "checkpoint truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void put_matrix(std::string& buf, const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) put<double>(buf, m(r, c));
}

Eigen::MatrixXd take_matrix(const std::string& buf, size_t& pos, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = take<double>(buf, pos);
  return m;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  const LagrangianState& s = c.state;
  const auto n = static_cast<Eigen::Index>(c.n);
  if (s.x.rows() != n || s.V.rows() != n || s.wave.h.size() != n || s.wave.ht.size() != n ||
      s.xt.rows() != n || s.Vt.rows() != n)
    fail(ErrorKind::Format, "checkpoint fields do not match the grid descriptor");
  std::string buf;
  buf.append(kMagic, 8);
  put<std::uint32_t>(buf, c.version);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(c.d));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(c.n_tangential));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(c.n_radial));
  put<std::uint64_t>(buf, c.n);
  put<double>(buf, s.t);
  put<double>(buf, c.dt);
  put<std::uint64_t>(buf, c.config_hash);
  put<double>(buf, c.taylor_initial);
  put_matrix(buf, s.x);
  put_matrix(buf, s.V);
  put_matrix(buf, s.wave.h);
  put_matrix(buf, s.wave.ht);
  put_matrix(buf, s.xt);
  put_matrix(buf, s.Vt);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Format, "cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Format, "cannot open " + path);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 64 || std::memcmp(buf.data(), kMagic, 8) != 0)
    fail(ErrorKind::Format, path + " is not a checkpoint");
  size_t pos = 8;
  Checkpoint c;
  c.version = take<std::uint32_t>(buf, pos);
  if (c.version != kCheckpointVersion)
    fail(ErrorKind::Format, "unsupported checkpoint version " + std::to_string(c.version));
  c.d = static_cast<int>(take<std::uint32_t>(buf, pos));
  c.n_tangential = static_cast<int>(take<std::uint32_t>(buf, pos));
  c.n_radial = static_cast<int>(take<std::uint32_t>(buf, pos));
  c.n = take<std::uint64_t>(buf, pos);
  c.state.t = take<double>(buf, pos);
  c.dt = take<double>(buf, pos);
  c.config_hash = take<std::uint64_t>(buf, pos);
  c.taylor_initial = take<double>(buf, pos);
  const auto n = static_cast<Eigen::Index>(c.n);
  const size_t expect = 64 + sizeof(double) * c.n * static_cast<size_t>(4 * c.d + 2);
  if (buf.size() != expect) fail(ErrorKind::Format, path + " has the wrong size for its descriptor");
  c.state.x = take_matrix(buf, pos, n, c.d);
  c.state.V = take_matrix(buf, pos, n, c.d);
  c.state.wave.h = take_matrix(buf, pos, n, 1);
  c.state.wave.ht = take_matrix(buf, pos, n, 1);
  c.state.xt = take_matrix(buf, pos, n, c.d);
  c.state.Vt = take_matrix(buf, pos, n, c.d);
  c.state.wave.t = c.state.t;
  return c;
}

std::string trace_csv(const EnergyTrace& tr, int every) {
  std::ostringstream os;
  for (size_t c = 0; c < tr.columns.size(); ++c) os << (c ? "," : "") << tr.columns[c];
  os << '\n';
  char num[32];
  for (size_t r = 0; r < tr.rows.size(); ++r) {
    if (r % static_cast<size_t>(every) != 0 && r + 1 != tr.rows.size()) continue;
    for (size_t c = 0; c < tr.rows[r].size(); ++c) {
      std::snprintf(num, sizeof num, "%.17g", tr.rows[r][c]);
      os << (c ? "," : "") << num;
    }
    os << '\n';
  }
  return os.str();
}

void write_trace_csv(const std::string& path, const EnergyTrace& tr, int every) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Format, "cannot write " + path);
  out << trace_csv(tr, every);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Format, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace fbe
