#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace ecorb::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "1.0.0";

// 17 significant digits so that values survive a text round trip
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : width_(header.size()) { row_strings(header); }

  void row(const std::vector<double>& values, const std::string& tail = {}) {
    std::vector<std::string> cells;
    cells.reserve(values.size() + 1);
    for (double v : values) cells.push_back(num(v));
    if (!tail.empty() || cells.size() < width_) cells.push_back(tail);
    row_strings(cells);
  }

  const std::string& str() const { return buf_; }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += cells[i];
    }
    buf_ += '\n';
  }
  std::size_t width_;
  std::string buf_;
};

// Relative --out paths land under $ECORB_OUT_DIR when it is set.
inline std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* base = std::getenv("ECORB_OUT_DIR"); base && *base) p = std::filesystem::path(base) / p;
  }
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << data;
  if (!f) throw std::runtime_error("write to " + p.string() + " failed");
}

struct Manifest {
  std::string command;
  json params = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json to_json() const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {{"command", command}, {"version", version}, {"params", params}, {"wall_time_s", wall}};
  }
};

// CSV goes to --out (manifest alongside as <out>.manifest.json) or stdout.
inline void emit_csv(const std::string& out, const CsvWriter& csv, const Manifest& m,
                     const json& extra = json::object()) {
  if (out.empty()) {
    std::cout << csv.str();
    return;
  }
  const auto p = resolve_out(out);
  write_file(p, csv.str());
  json j = m.to_json();
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_file(p.string() + ".manifest.json", j.dump(2) + "\n");
}

// JSON documents embed their manifest.
inline void emit_json(const std::string& out, json body, const Manifest& m) {
  json doc = {{"manifest", m.to_json()}};
  for (auto& [k, v] : body.items()) doc[k] = std::move(v);
  const std::string text = doc.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(resolve_out(out), text);
}

}  // namespace ecorb::cli
