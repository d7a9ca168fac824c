#pragma once

// Line-delimited comma-separated record formats.
//
//   strategies : id,quality,cost,latency[,label]
//   requests   : id,quality,cost,latency,k[,payoff[,request_class]]
//   models     : strategy_id,parameter,alpha,beta[,request_class]
//                parameter is one of quality|cost|latency
//   plan       : request_id,requirement,strategies   (strategies joined by ';')
//                total,<objective>,<workforce_used>  (trailer)
//   adpar      : request_id,quality,cost,latency,alt_quality,alt_cost,alt_latency,distance,strategies
//
// Blank lines and lines starting with '#' are skipped, as is a leading header
// row. Numbers are written in shortest round-trip form.

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "stratrec/adpar.hpp"
#include "stratrec/batchstrat.hpp"
#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"
#include "stratrec/workforce.hpp"

namespace stratrec::io {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return {buf, end};
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    std::string_view field = line.substr(start, at == std::string_view::npos ? line.npos : at - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.emplace_back(field);
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

namespace detail {

struct Record {
  std::size_t line_no;
  std::vector<std::string> fields;
};

inline std::vector<Record> records(std::istream& in, std::string_view header_first_field) {
  std::vector<Record> out;
  std::string line;
  std::size_t no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++no;
    std::string_view v(line);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty() || v.front() == '#' || v == "\r") continue;
    auto fields = split(v);
    if (first && !fields.empty() && fields[0] == header_first_field) {
      first = false;
      continue;
    }
    first = false;
    out.push_back({no, std::move(fields)});
  }
  return out;
}

inline double parse_double(const std::string& s, const Record& r, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(r.line_no) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s, const Record& r, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError("line " + std::to_string(r.line_no) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

inline void expect_fields(const Record& r, std::size_t lo, std::size_t hi, const char* kind) {
  if (r.fields.size() < lo || r.fields.size() > hi) {
    throw ValidationError("line " + std::to_string(r.line_no) + ": " + kind + " record needs " +
                          std::to_string(lo) + ".." + std::to_string(hi) + " fields, got " +
                          std::to_string(r.fields.size()));
  }
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline std::vector<Strategy> read_strategies(std::istream& in) {
  std::vector<Strategy> out;
  for (const auto& r : detail::records(in, "id")) {
    detail::expect_fields(r, 4, 5, "strategy");
    Strategy s;
    s.id = r.fields[0];
    s.quality = detail::parse_double(r.fields[1], r, "quality");
    s.cost = detail::parse_double(r.fields[2], r, "cost");
    s.latency = detail::parse_double(r.fields[3], r, "latency");
    if (r.fields.size() > 4) s.label = r.fields[4];
    s.validate();
    out.push_back(std::move(s));
  }
  std::vector<std::string> ids;
  for (const auto& s : out) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw ValidationError("duplicate strategy id '" + *dup + "'");
  }
  return out;
}

inline void write_strategies(std::ostream& out, std::span<const Strategy> catalog) {
  out << "id,quality,cost,latency,label\n";
  for (const auto& s : catalog) {
    out << s.id << ',' << format_number(s.quality) << ',' << format_number(s.cost) << ','
        << format_number(s.latency) << ',' << s.label << '\n';
  }
}

inline std::vector<DeploymentRequest> read_requests(std::istream& in) {
  std::vector<DeploymentRequest> out;
  for (const auto& r : detail::records(in, "id")) {
    detail::expect_fields(r, 5, 7, "request");
    DeploymentRequest d;
    d.id = r.fields[0];
    d.quality = detail::parse_double(r.fields[1], r, "quality");
    d.cost = detail::parse_double(r.fields[2], r, "cost");
    d.latency = detail::parse_double(r.fields[3], r, "latency");
    d.k = detail::parse_int(r.fields[4], r, "k");
    if (r.fields.size() > 5 && !r.fields[5].empty()) d.payoff = detail::parse_double(r.fields[5], r, "payoff");
    if (r.fields.size() > 6) d.request_class = r.fields[6];
    d.validate();
    out.push_back(std::move(d));
  }
  return out;
}

inline void write_requests(std::ostream& out, std::span<const DeploymentRequest> batch) {
  out << "id,quality,cost,latency,k,payoff,request_class\n";
  for (const auto& d : batch) {
    out << d.id << ',' << format_number(d.quality) << ',' << format_number(d.cost) << ','
        << format_number(d.latency) << ',' << d.k << ',' << (d.payoff ? format_number(*d.payoff) : "")
        << ',' << d.request_class << '\n';
  }
}

inline Axis parse_axis(const std::string& s) {
  if (s == "quality") return Axis::Quality;
  if (s == "cost") return Axis::Cost;
  if (s == "latency") return Axis::Latency;
  throw ValidationError("unknown parameter '" + s + "' (expected quality|cost|latency)");
}

inline ModelCatalog read_models(std::istream& in) {
  ModelCatalog models;
  for (const auto& r : detail::records(in, "strategy_id")) {
    detail::expect_fields(r, 4, 5, "model");
    const Axis axis = parse_axis(r.fields[1]);
    const LinearModel m{detail::parse_double(r.fields[2], r, "alpha"),
                        detail::parse_double(r.fields[3], r, "beta")};
    if (r.fields.size() > 4 && !r.fields[4].empty()) {
      models.set_override(r.fields[4], r.fields[0], axis, m);
    } else {
      models.set(r.fields[0], axis, m);
    }
  }
  return models;
}

inline void write_models(std::ostream& out, const ModelCatalog& models) {
  out << "strategy_id,parameter,alpha,beta,request_class\n";
  models.for_each([&](const std::string& cls, const std::string& id, Axis a, const LinearModel& m) {
    out << id << ',' << axis_name(a) << ',' << format_number(m.alpha) << ',' << format_number(m.beta)
        << ',' << cls << '\n';
  });
}

inline void write_plan(std::ostream& out, const BatchPlan& plan) {
  out << "request_id,requirement,strategies\n";
  for (std::size_t i = 0; i < plan.selected.size(); ++i) {
    out << plan.selected[i] << ',' << format_number(plan.requirements[i]) << ','
        << (i < plan.recommendations.size() ? join(plan.recommendations[i], ';') : "") << '\n';
  }
  out << "total," << format_number(plan.objective) << ',' << format_number(plan.workforce_used) << '\n';
}

inline BatchPlan read_plan(std::istream& in) {
  BatchPlan plan;
  bool trailer = false;
  for (const auto& r : detail::records(in, "request_id")) {
    detail::expect_fields(r, 3, 3, "plan");
    if (r.fields[0] == "total") {
      plan.objective = detail::parse_double(r.fields[1], r, "objective");
      plan.workforce_used = detail::parse_double(r.fields[2], r, "workforce_used");
      trailer = true;
      continue;
    }
    plan.selected.push_back(r.fields[0]);
    plan.requirements.push_back(detail::parse_double(r.fields[1], r, "requirement"));
    plan.recommendations.push_back(r.fields[2].empty() ? std::vector<std::string>{} : split(r.fields[2], ';'));
  }
  if (!trailer) throw ValidationError("plan report has no total line");
  return plan;
}

/// One ADPaR outcome; `result` is empty when the algorithm reported failure.
struct AdparRecord {
  DeploymentRequest request;
  std::optional<AdparResult> result;
};

inline void write_adpar(std::ostream& out, std::span<const AdparRecord> rows) {
  out << "request_id,quality,cost,latency,alt_quality,alt_cost,alt_latency,distance,strategies\n";
  for (const auto& row : rows) {
    const auto& d = row.request;
    out << d.id << ',' << format_number(d.quality) << ',' << format_number(d.cost) << ','
        << format_number(d.latency) << ',';
    if (row.result) {
      const auto& a = row.result->alternative;
      out << format_number(a.quality) << ',' << format_number(a.cost) << ',' << format_number(a.latency)
          << ',' << format_number(row.result->distance) << ',' << join(row.result->chosen, ';') << '\n';
    } else {
      out << ",,,failure,\n";
    }
  }
}

inline std::vector<AdparRecord> read_adpar(std::istream& in) {
  std::vector<AdparRecord> out;
  for (const auto& r : detail::records(in, "request_id")) {
    detail::expect_fields(r, 9, 9, "adpar");
    AdparRecord rec;
    rec.request.id = r.fields[0];
    rec.request.quality = detail::parse_double(r.fields[1], r, "quality");
    rec.request.cost = detail::parse_double(r.fields[2], r, "cost");
    rec.request.latency = detail::parse_double(r.fields[3], r, "latency");
    if (r.fields[7] != "failure") {
      AdparResult res;
      res.alternative = rec.request;
      res.alternative.quality = detail::parse_double(r.fields[4], r, "alt_quality");
      res.alternative.cost = detail::parse_double(r.fields[5], r, "alt_cost");
      res.alternative.latency = detail::parse_double(r.fields[6], r, "alt_latency");
      res.distance = detail::parse_double(r.fields[7], r, "distance");
      res.chosen = split(r.fields[8], ';');
      rec.result = std::move(res);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<Strategy> load_strategies(const std::string& path) {
  auto in = detail::open_in(path);
  return read_strategies(in);
}
inline std::vector<DeploymentRequest> load_requests(const std::string& path) {
  auto in = detail::open_in(path);
  return read_requests(in);
}
inline ModelCatalog load_models(const std::string& path) {
  auto in = detail::open_in(path);
  return read_models(in);
}

}  // namespace stratrec::io
