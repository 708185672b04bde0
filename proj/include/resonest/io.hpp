#ifndef RESONEST_IO_HPP
#define RESONEST_IO_HPP

#include <json.hpp>

#include "resonest/scan.hpp"

namespace resonest {

namespace detail {

inline std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse17(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace detail

inline std::string csv_header(int n) {
  std::string h = "z";
  for (int j = 1; j <= n; ++j) h += ",omega" + std::to_string(j);
  for (int j = 1; j <= n; ++j) h += ",p0" + std::to_string(j);
  return h + ",status,J,K,s0,ell,alpha,M,E,calE,r,r_backtransformed,T,notes";
}

/// Records as CSV in the fixed column order, 17 significant digits.
inline std::string records_to_csv(const std::vector<StabilityRecord>& records, int n) {
  using detail::fmt17;
  std::string out = csv_header(n) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.z);
    for (int j = 0; j < n; ++j)
      out += "," + fmt17(j < int(r.omega.size()) ? r.omega[std::size_t(j)] : 0.0);
    for (int j = 0; j < n; ++j) out += "," + fmt17(r.p0[j]);
    out += "," + to_string(r.status);
    out += "," + std::to_string(r.J);
    out += "," + fmt17(r.K) + "," + fmt17(r.s0) + "," + fmt17(r.ell);
    out += "," + fmt17(r.alpha) + "," + fmt17(r.M) + "," + fmt17(r.E) + "," + fmt17(r.calE);
    out += "," + fmt17(r.r) + "," + fmt17(r.r_back) + "," + fmt17(r.T);
    out += "," + r.notes + "\n";
  }
  return out;
}

inline ScanStatus status_from_string(const std::string& s) {
  if (s == "success") return ScanStatus::success;
  if (s == "fail-norm") return ScanStatus::fail_norm;
  if (s == "fail-resonant") return ScanStatus::fail_resonant;
  if (s == "fail-inversion") return ScanStatus::fail_inversion;
  throw std::invalid_argument("unknown status: " + s);
}

/// Inverse of records_to_csv (round-trip fidelity check and tooling).
inline std::vector<StabilityRecord> records_from_csv(const std::string& text, int n) {
  std::vector<StabilityRecord> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else
        cur += ch;
    }
    f.push_back(cur);
    std::size_t want = std::size_t(1 + 2 * n + 13);
    if (f.size() < want) throw std::invalid_argument("csv row too short");
    StabilityRecord r;
    std::size_t i = 0;
    r.z = std::stoi(f[i++]);
    r.omega.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) r.omega[std::size_t(j)] = detail::parse17(f[i++]);
    for (int j = 0; j < n; ++j) r.p0[j] = detail::parse17(f[i++]);
    r.status = status_from_string(f[i++]);
    r.J = std::stoi(f[i++]);
    r.K = detail::parse17(f[i++]);
    r.s0 = detail::parse17(f[i++]);
    r.ell = detail::parse17(f[i++]);
    r.alpha = detail::parse17(f[i++]);
    r.M = detail::parse17(f[i++]);
    r.E = detail::parse17(f[i++]);
    r.calE = detail::parse17(f[i++]);
    r.r = detail::parse17(f[i++]);
    r.r_back = detail::parse17(f[i++]);
    r.T = detail::parse17(f[i++]);
    for (; i < f.size(); ++i) r.notes += (r.notes.empty() ? "" : ",") + f[i];
    out.push_back(std::move(r));
  }
  return out;
}

inline nlohmann::json record_to_json(const StabilityRecord& r) {
  nlohmann::json j;
  j["z"] = r.z;
  if (r.ray >= 0) j["ray"] = r.ray;
  j["omega"] = r.omega;
  j["p0"] = std::vector<double>(r.p0.begin(), r.p0.end());
  j["status"] = to_string(r.status);
  j["J"] = r.J;
  j["K"] = r.K;
  j["s0"] = r.s0;
  j["ell"] = r.ell;
  j["alpha"] = r.alpha;
  j["M"] = r.M;
  j["E"] = r.E;
  j["calE"] = r.calE;
  j["r"] = r.r;
  j["r_backtransformed"] = r.r_back;
  j["T"] = std::isinf(r.T) ? nlohmann::json("inf") : nlohmann::json(r.T);
  j["notes"] = r.notes;
  return j;
}

inline std::string lines_to_csv(const std::vector<ResonanceLineRow>& rows, int n) {
  using detail::fmt17;
  std::string out = "harmonic,label";
  for (int j = 1; j <= n; ++j) out += ",pstar" + std::to_string(j);
  out += ",halfwidth,amplitude,order_class\n";
  for (const auto& row : rows) {
    std::string kk = "(";
    for (int j = 0; j < n; ++j)
      kk += std::to_string(row.line.k.k[j]) + (j + 1 < n ? ";" : ")");
    out += kk + "," + row.label;
    for (int j = 0; j < n; ++j) out += "," + fmt17(row.line.p_star[j]);
    out += "," + fmt17(row.line.halfwidth) + "," + fmt17(row.line.amplitude) + "," +
           row.order_name + "\n";
  }
  return out;
}

/// Writes the configured output files; the timestamp lives in one JSON meta
/// field so the data payload stays byte-reproducible.
inline void emit(const ScanConfig& cfg, const ScanResult& res, const std::string& timestamp = "") {
  const int n = res.normalized.h.n;
  if (!cfg.output_csv.empty()) {
    std::ofstream f(cfg.output_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + cfg.output_csv);
    f << records_to_csv(res.records, n);
  }
  if (!cfg.output_json.empty()) {
    nlohmann::json j;
    j["meta"]["model"] = cfg.model == ModelKind::spin_orbit ? "spin_orbit" : "spin_spin";
    j["meta"]["J"] = cfg.J;
    j["meta"]["normalization"] = cfg.per_point_normalization ? "per_point" : "global";
    j["meta"]["e"] = cfg.params.e;
    j["meta"]["eps1"] = cfg.params.eps1;
    j["meta"]["eps2"] = cfg.params.eps2;
    j["meta"]["Ic"] = {cfg.params.Ic1, cfg.params.Ic2};
    j["meta"]["Mass"] = {cfg.params.M1, cfg.params.M2};
    j["meta"]["r0"] = cfg.r0 > 0 ? nlohmann::json(cfg.r0) : nlohmann::json("auto-half-singularity-distance");
    j["meta"]["warnings"] = res.log.warnings;
    if (!timestamp.empty()) j["meta"]["generated_at"] = timestamp;
    if (cfg.model == ModelKind::spin_spin) {
      j["meta"]["resonance"] = cfg.pair.label();
      j["meta"]["atilde_scale"] = cfg.atilde_scale;
      j["meta"]["atilde_swirl"] = cfg.atilde_swirl;
    } else {
      nlohmann::json seqs = nlohmann::json::array();
      for (const auto& s : cfg.sequences)
        seqs.push_back({{"resonance", s.resonance.label()}, {"s", s.s}});
      j["meta"]["sequences"] = seqs;
    }
    j["records"] = nlohmann::json::array();
    for (const auto& r : res.records) j["records"].push_back(record_to_json(r));
    j["verifications"] = nlohmann::json::array();
    for (const auto& v : res.verifications) {
      nlohmann::json vj;
      vj["record_index"] = v.record_index;
      vj["bound"] = v.bound;
      vj["max_deviation"] = v.report.max_deviation;
      vj["within_bound"] = v.report.within_bound;
      vj["energy_drift"] = v.report.energy_drift;
      vj["reliable"] = v.report.reliable;
      j["verifications"].push_back(vj);
    }
    std::ofstream f(cfg.output_json, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + cfg.output_json);
    f << j.dump(2) << "\n";
  }
  if (!cfg.output_resonances.empty()) {
    std::ofstream f(cfg.output_resonances, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + cfg.output_resonances);
    f << lines_to_csv(res.lines, n);
  }
}

}  // namespace resonest

#endif
