#include "torqueid/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "torqueid/errors.hpp"
#include "torqueid/keyvalue.hpp"

namespace torqueid {

using acquisition::Dataset;
using acquisition::Sample;

namespace {
constexpr int kColumns = 1 + 3 * kNumJoints + kNumJoints;
}

std::string dataset_csv_header() {
  std::string h = "t";
  for (const char* prefix : {"q", "dq", "ddq", "tau"}) {
    for (int j = 1; j <= kNumJoints; ++j) h += "," + std::string(prefix) + std::to_string(j);
  }
  return h;
}

std::string format_dataset_csv(const Dataset& dataset) {
  std::string out = dataset_csv_header();
  out += '\n';
  out.reserve(out.size() + dataset.size() * kColumns * 20);
  char buf[64];
  auto put = [&](double v, bool first) {
    if (!first) out += ',';
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
  };
  for (const Sample& s : dataset.samples) {
    put(s.t, true);
    for (const Vector6* v : {&s.state.q, &s.state.qd, &s.state.qdd, &s.torque.tau}) {
      for (int j = 0; j < kNumJoints; ++j) put((*v)(j), false);
    }
    out += '\n';
  }
  return out;
}

Dataset parse_dataset_csv(std::string_view text, const std::string& source) {
  const std::string header = dataset_csv_header();
  const auto first_nl = text.find('\n');
  if (first_nl == std::string_view::npos || text.substr(0, first_nl) != header) {
    throw ValidationError(source + ": header must be exactly '" + header + "'");
  }

  Dataset out;
  std::size_t pos = first_nl + 1;
  std::size_t line_no = 1;
  std::array<double, kColumns> row{};
  while (pos < text.size()) {
    ++line_no;
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;

    const char* p = line.data();
    const char* const stop = line.data() + line.size();
    for (int c = 0; c < kColumns; ++c) {
      const auto [ptr, ec] = std::from_chars(p, stop, row[c]);
      const bool last = c == kColumns - 1;
      if (ec != std::errc{} || !std::isfinite(row[c]) || (last ? ptr != stop : (ptr == stop || *ptr != ','))) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": malformed value in column " +
                              std::to_string(c + 1));
      }
      p = ptr + 1;
    }

    Sample s;
    s.t = row[0];
    for (int j = 0; j < kNumJoints; ++j) {
      s.state.q(j) = row[1 + j];
      s.state.qd(j) = row[1 + kNumJoints + j];
      s.state.qdd(j) = row[1 + 2 * kNumJoints + j];
      s.torque.tau(j) = row[1 + 3 * kNumJoints + j];
    }
    out.samples.push_back(s);
  }
  if (out.empty()) throw ValidationError(source + ": dataset has no rows");
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, format_dataset_csv(dataset));
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  return parse_dataset_csv(read_text_file(path), path.string());
}

}  // namespace torqueid
