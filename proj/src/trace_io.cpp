// trace_io.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pof {

namespace {
std::string meta_path(const std::string& path) { return path + ".meta.json"; }
}  // namespace

void save_trace_csv(const RssTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot write trace file: " + path);
  out << "t_s,rss_db\n";
  out.precision(9);
  for (const auto& s : trace.samples) out << s.t << ',' << s.rss << '\n';

  nlohmann::json meta = {{"rate_hz", trace.rate},
                         {"vehicle_id", trace.vehicle_id},
                         {"start_t_s", trace.samples.empty()
                                           ? 0.0
                                           : trace.start_time()}};
  std::ofstream mout(meta_path(path));
  if (!mout) {
    throw InvalidArgumentError("cannot write metadata: " + meta_path(path));
  }
  mout << meta.dump(2) << '\n';
}

RssTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open trace file: " + path);
  RssTrace trace;

  std::ifstream min(meta_path(path));
  if (min) {
    nlohmann::json meta;
    try {
      min >> meta;
      trace.rate = meta.at("rate_hz").get<double>();
      trace.vehicle_id = meta.value("vehicle_id", std::string{});
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgumentError(meta_path(path) + ": " + e.what());
    }
  }

  std::string line;
  if (!std::getline(in, line) || line.rfind("t_s,rss_db", 0) != 0) {
    throw InvalidArgumentError(path + ": expected header t_s,rss_db");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    RssSample s;
    char c = 0;
    if (!(ss >> s.t >> c >> s.rss) || c != ',') {
      throw InvalidArgumentError(path + ": bad row " + std::to_string(row) +
                                 ": " + line);
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() >= 2 && !min) {
    // No sidecar: infer the rate from the median spacing.
    trace.rate = 1.0 / (trace.samples[1].t - trace.samples[0].t);
  }
  return trace;
}

}  // namespace pof
