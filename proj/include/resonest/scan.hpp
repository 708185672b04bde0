#ifndef RESONEST_SCAN_HPP
#define RESONEST_SCAN_HPP

#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

#include "resonest/config.hpp"
#include "resonest/estimates.hpp"
#include "resonest/integrate.hpp"
#include "resonest/models.hpp"

namespace resonest {

enum class ModelKind { spin_orbit, spin_spin };

struct SequenceRequest {
  SpinOrbitResonance resonance;
  double s = 1.6;
};

/// Full scan description: model, sequences, normalization and optimizer
/// controls, outputs and verification budget.
struct ScanConfig {
  ModelKind model = ModelKind::spin_orbit;
  ModelParams params;

  // 1D sequences (one or two); 2D resonance pair
  std::vector<SequenceRequest> sequences;
  ResonancePair pair;
  std::vector<SequenceSide> sides{SequenceSide::below};
  int z_min = 2, z_max = 100, z_step = 1;
  int rays = 10;
  double atilde_scale = 0.1, atilde_swirl = 0.25;

  int J = 2;
  bool per_point_normalization = false;
  LieControls lie;
  OptimizerControls opt;
  double r0 = 0;  // 0 = auto: half the distance to the nearest singularity
  double identity_cap_fraction = 0.1;

  std::string output_csv, output_json, output_resonances;
  double resonance_amp_floor = 1e-12;

  int verify_samples = 3;
  double verify_budget = 1e6;
  double verify_rtol = 1e-10;
  int threads = 0;

  static SpinOrbitResonance parse_resonance(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
      throw ConfigError("resonance must look like k2:k1, got '" + text + "'");
    try {
      int k2 = std::stoi(text.substr(0, colon));
      int k1 = std::stoi(text.substr(colon + 1));
      return SpinOrbitResonance::of(k2, k1);
    } catch (const std::exception&) {
      throw ConfigError("bad resonance label '" + text + "'");
    }
  }

  static ScanConfig from_config(const KeyValueConfig& kv) {
    ScanConfig c;
    std::string model = kv.get_string("model", "spin_orbit");
    if (model == "spin_orbit")
      c.model = ModelKind::spin_orbit;
    else if (model == "spin_spin")
      c.model = ModelKind::spin_spin;
    else
      throw ConfigError("model must be spin_orbit or spin_spin");

    c.params = ModelParams{};
    if (c.model == ModelKind::spin_orbit) {
      c.params.eps1 = kv.get_double("eps", 1e-4);
      c.params.eps2 = 0;
    } else {
      c.params.eps1 = kv.get_double("eps1", 1e-5);
      c.params.eps2 = kv.get_double("eps2", 1e-5);
    }
    c.params.e = kv.get_double("e", 0.1);
    c.params.Ic1 = kv.get_double("Ic1", 0.5);
    c.params.Ic2 = kv.get_double("Ic2", 0.5);
    c.params.M1 = kv.get_double("M1", 0.5);
    c.params.M2 = kv.get_double("M2", 0.5);
    c.params.a = kv.get_double("a", 1.0);
    c.params.m = kv.get_double("m", c.params.M1 * c.params.M2 * std::pow(c.params.a, 3));

    if (c.model == ModelKind::spin_orbit) {
      c.sequences.clear();
      std::string r1 = kv.get_string("resonance", "1:1");
      c.sequences.push_back({parse_resonance(r1), kv.get_double("s", 1.6)});
      if (kv.has("resonance2"))
        c.sequences.push_back(
            {parse_resonance(kv.get_string("resonance2", "")), kv.get_double("s2", 0.6)});
      std::string side = kv.get_string("side", "below");
      if (side == "below")
        c.sides = {SequenceSide::below};
      else if (side == "above")
        c.sides = {SequenceSide::above};
      else if (side == "both")
        c.sides = {SequenceSide::below, SequenceSide::above};
      else
        throw ConfigError("side must be below, above or both");
    } else {
      std::string lbl = kv.get_string("resonance", "1:1,3:2");
      auto comma = lbl.find(',');
      if (comma == std::string::npos)
        throw ConfigError("spin_spin resonance must be a pair like 1:1,3:2");
      c.pair.first = parse_resonance(lbl.substr(0, comma));
      c.pair.second = parse_resonance(lbl.substr(comma + 1));
      c.rays = kv.get_int("rays", 10);
      c.atilde_scale = kv.get_double("atilde_scale", 0.1);
      c.atilde_swirl = kv.get_double("atilde_swirl", 0.25);
    }
    c.z_min = kv.get_int("z_min", 2);
    c.z_max = kv.get_int("z_max", 100);
    c.z_step = kv.get_int("z_step", 1);
    if (c.z_step <= 0) throw ConfigError("z_step must be positive");

    c.J = kv.get_int("J", 2);
    if (c.J < 0) throw ConfigError("J must be nonnegative");
    std::string mode = kv.get_string("normalization", "global");
    if (mode == "per_point")
      c.per_point_normalization = true;
    else if (mode != "global")
      throw ConfigError("normalization must be global or per_point");

    c.lie.mag_threshold = kv.get_double("mag_threshold", 1e-20);
    c.lie.max_order = kv.get_int("max_order", 12);
    c.lie.max_fourier_order = kv.get_int("max_fourier_order", 48);
    c.lie.eps_cap = kv.get_int("eps_cap", c.model == ModelKind::spin_spin ? 5 : 0);

    c.opt.dK_initial = kv.get_double("dK_initial", 10.0);
    c.opt.dK_control = kv.get_double("dK_control", 0.1);
    c.opt.N_control = kv.get_int("N_control", 20);
    c.opt.c_control = kv.get_double("c_control", 1.0 / 3.0);
    c.opt.K_control =
        kv.get_double("K_control", c.model == ModelKind::spin_orbit ? 1e5 : 150.0);
    c.opt.T_control = kv.get_double(
        "T_control", c.model == ModelKind::spin_orbit ? std::numeric_limits<double>::infinity()
                                                      : 1e100);
    c.opt.tol = kv.get_double("tol", 1e-8);
    c.opt.safety = kv.get_double("safety", 0.99);
    c.opt.sup.circle_samples = kv.get_int("circle_samples", 720);

    c.r0 = kv.get_double("r0", 0.0);
    c.identity_cap_fraction = kv.get_double("identity_cap_fraction", 0.1);

    c.output_csv = kv.get_string("output_csv", "");
    c.output_json = kv.get_string("output_json", "");
    c.output_resonances = kv.get_string("output_resonances", "");
    c.resonance_amp_floor = kv.get_double("resonance_amp_floor", 1e-12);

    c.verify_samples = kv.get_int("verify_samples", 3);
    c.verify_budget = kv.get_double("verify_budget", 1e6);
    c.verify_rtol = kv.get_double("verify_rtol", 1e-10);
    c.threads = kv.get_int("threads", 0);

    kv.reject_unknown_keys();
    return c;
  }

  std::pair<IntegrableHamiltonian, PoissonSeries> build_model() const {
    if (model == ModelKind::spin_orbit) return spin_orbit_hamiltonian(params.eps1, params.e);
    return spin_spin_hamiltonian(params);
  }
};

/// One requested scan point: the target frequency plus grid bookkeeping.
struct PointSpec {
  FrequencyVector target;
  int z = 0;
  int ray = -1;
  std::string label;
};

inline std::vector<PointSpec> scan_targets(const ScanConfig& cfg) {
  std::vector<PointSpec> pts;
  if (cfg.model == ModelKind::spin_orbit) {
    for (const auto& seq : cfg.sequences)
      for (SequenceSide side : cfg.sides)
        for (int z = cfg.z_min; z <= cfg.z_max; z += cfg.z_step) {
          PointSpec p;
          p.target = seq_1d(seq.resonance, seq.s, z, side);
          p.z = z;
          p.label = seq.resonance.label() +
                    (side == SequenceSide::below ? ";side=below" : ";side=above");
          pts.push_back(std::move(p));
        }
  } else {
    for (int ray = 0; ray < cfg.rays; ++ray) {
      double th = 2 * M_PI * ray / cfg.rays;
      double u1 = std::round(1024 * std::cos(th)) / 1024.0;
      double u2 = std::round(1024 * std::sin(th)) / 1024.0;
      std::array<double, 4> at = {cfg.atilde_scale * u1, -cfg.atilde_scale * cfg.atilde_swirl * u2,
                                  cfg.atilde_scale * u2, cfg.atilde_scale * cfg.atilde_swirl * u1};
      for (int z = cfg.z_min; z <= cfg.z_max; z += cfg.z_step) {
        PointSpec p;
        p.target = seq_2d(cfg.pair, at, z);
        p.target.ray = ray;
        p.z = z;
        p.ray = ray;
        p.label = cfg.pair.label() + ";ray=" + std::to_string(ray);
        pts.push_back(std::move(p));
      }
    }
  }
  return pts;
}

/// First-guess actions from the bare normal form.
inline std::array<double, 3> normal_form_guess(const IntegrableHamiltonian& h,
                                               const FrequencyVector& f) {
  std::array<double, 3> p{0, 0, 0};
  for (int j = 0; j + 1 < h.n; ++j) p[j] = (f.omega[std::size_t(j)] - h.linear[j]) / h.quadratic[j];
  return p;
}

struct ResonanceLineRow {
  ResonanceLine line;
  std::string label;
  std::string order_name;
};

struct VerificationRow {
  int record_index = -1;
  IntegrationReport report;
  double bound = 0;
};

struct ScanResult {
  std::vector<StabilityRecord> records;
  std::vector<ResonanceLineRow> lines;
  std::vector<VerificationRow> verifications;
  HamiltonianSplit normalized;
  std::vector<GeneratingFunction> chis;
  NormalizeLog log;
  std::string metadata_notes;
  ScanResult() : normalized(2) {}
};

namespace detail {

inline std::string reduced_label(const FourierIndex& k) {
  int n = k.n;
  int g = 0;
  for (int j = 0; j < n; ++j) g = std::gcd(g, std::abs(k.k[j]));
  if (g == 0) g = 1;
  std::string s = std::to_string(-k.k[n - 1] / g);
  s += ":" + std::to_string(k.k[0] / g);
  if (n == 3) s += ":" + std::to_string(k.k[1] / g);
  return s;
}

inline void shrink_domain(std::vector<ActionBall>& balls, const HamiltonianSplit& split,
                          double safety) {
  // both the present denominators and the divisor lines of the current
  // support (the singularities of the next generating function)
  std::set<AffineFactor> forms;
  split.h.zcorr.collect_factors(forms);
  split.remainder.collect_factors(forms);
  for (const auto& [k, c] : split.remainder.entries())
    if (!k.is_zero() && !split.h.divisor_identically_zero(k)) {
      AffineFactor f = split.h.divisor_form(k);
      bool flat = true;
      for (int j = 0; j < split.h.n; ++j)
        if (f.c[j] != 0) flat = false;
      if (!flat) forms.insert(f);
    }
  for (auto& b : balls) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& f : forms) d = std::min(d, f.zero_distance(b.center, split.h.n));
    if (std::isfinite(d)) b.radius = std::max(1e-12, std::min(b.radius, 0.5 * safety * d));
  }
}

}  // namespace detail

/// Normalizes the model over the working domain spanned by the scan targets,
/// shrinking the pruning balls as new divisors appear step by step.
inline void normalize_for_scan(const ScanConfig& cfg, HamiltonianSplit& split,
                               std::vector<GeneratingFunction>& chis, LieControls& lie,
                               NormalizeLog& log) {
  for (int s = 0; s < cfg.J; ++s) {
    double before = detail::series_measure(split.remainder, lie);
    StepResult res = normalize_step(split, lie);
    double after = detail::series_measure(res.split.remainder, lie);
    if (res.divergence_warning)
      log.warnings.push_back("lie-divergence-warning@step" + std::to_string(s + 1));
    if (after > before && !split.remainder.empty()) {
      log.warnings.push_back("optimal-order-stop@step" + std::to_string(s + 1));
      log.stopped_early = true;
      break;
    }
    split = std::move(res.split);
    chis.push_back(std::move(res.chi));
    log.remainder_measures.push_back(after);
    log.entry_counts.push_back(split.remainder.entry_count());
    log.term_counts.push_back(split.remainder.term_count());
    log.supports.push_back({});
    for (const auto& [k, c] : split.remainder.entries()) log.supports.back().push_back(k);
    detail::shrink_domain(lie.domain, split, cfg.opt.safety);
  }
}

/// Resonance-line metadata: main harmonics of the original perturbation plus
/// harmonics first appearing in later remainders, above the amplitude floor.
inline std::vector<ResonanceLineRow> resonance_lines(const ScanConfig& cfg,
                                                     const PoissonSeries& r0,
                                                     const HamiltonianSplit& final_split,
                                                     const NormalizeLog& log,
                                                     const std::array<double, 3>& hint) {
  std::vector<ResonanceLineRow> rows;
  std::map<FourierIndex, int> first_step;  // 0 = main
  for (const auto& [k, c] : r0.entries())
    if (!k.is_zero()) first_step.emplace(k, 0);
  for (std::size_t s = 0; s < log.supports.size(); ++s)
    for (const auto& k : log.supports[s]) first_step.emplace(k, int(s) + 1);

  for (const auto& [k, step] : first_step) {
    bool has_action = k.k[0] != 0 || (final_split.h.n == 3 && k.k[1] != 0);
    if (!has_action) continue;
    const PoissonSeries& src = step == 0 ? r0 : final_split.remainder;
    ResonanceLine line;
    try {
      line = resonance_halfwidth(final_split.h, src, k, hint);
    } catch (const std::exception&) {
      continue;
    }
    if (line.halfwidth <= 0) continue;
    if (line.amplitude < cfg.resonance_amp_floor && step > 0) continue;
    line.order_class = step;
    ResonanceLineRow row;
    row.line = line;
    row.label = detail::reduced_label(k);
    row.order_name = step == 0 ? "main" : "secondary-" + std::to_string(step);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Full scan: generate targets, invert frequencies on the normalized
/// Hamiltonian, run the optimizer per point, back-transform, then verify a
/// sample of successes by direct integration of the original system.
inline ScanResult run_scan(const ScanConfig& cfg) {
  ScanResult out;
  auto [h0, r0] = cfg.build_model();
  HamiltonianSplit split0(h0.n);
  split0.h = h0;
  split0.remainder = r0;

  std::vector<PointSpec> pts = scan_targets(cfg);

  // working balls around the bare-normal-form guesses
  LieControls lie = cfg.lie;
  lie.domain.clear();
  {
    std::set<AffineFactor> forms;
    for (const auto& [k, c] : r0.entries())
      if (!k.is_zero() && !h0.divisor_identically_zero(k)) forms.insert(h0.divisor_form(k));
    for (const auto& p : pts) {
      ActionBall b;
      b.n = h0.n;
      b.center = normal_form_guess(h0, p.target);
      double d = std::numeric_limits<double>::infinity();
      for (const auto& f : forms) d = std::min(d, f.zero_distance(b.center, h0.n));
      double cap = cfg.r0 > 0 ? cfg.r0 : std::numeric_limits<double>::infinity();
      b.radius = std::max(1e-12, std::min(cap, 0.5 * cfg.opt.safety * d));
      lie.domain.push_back(b);
    }
  }

  HamiltonianSplit split = split0;
  std::vector<GeneratingFunction> chis;
  if (!cfg.per_point_normalization) normalize_for_scan(cfg, split, chis, lie, out.log);

  std::vector<CoordinateFlow> back_flows = build_back_flows(chis, lie);

  out.records.assign(pts.size(), StabilityRecord{});
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= pts.size()) return;
      const PointSpec& ps = pts[i];
      StabilityRecord rec;
      rec.z = ps.z;
      rec.ray = ps.ray;
      rec.omega = ps.target.omega;
      rec.J = cfg.J;

      HamiltonianSplit local(split.remainder.n_angles());
      const HamiltonianSplit* use_split = &split;
      const std::vector<CoordinateFlow>* use_flows = &back_flows;
      std::vector<CoordinateFlow> local_flows;
      LieControls local_lie = cfg.lie;
      if (cfg.per_point_normalization) {
        local = split0;
        ActionBall b;
        b.n = h0.n;
        b.center = normal_form_guess(h0, ps.target);
        b.radius = lie.domain[i].radius;
        local_lie.domain = {b};
        std::vector<GeneratingFunction> local_chis;
        NormalizeLog llog;
        normalize_for_scan(cfg, local, local_chis, local_lie, llog);
        local_flows = build_back_flows(local_chis, local_lie);
        use_split = &local;
        use_flows = &local_flows;
      }

      try {
        std::array<double, 3> guess = normal_form_guess(use_split->h, ps.target);
        rec.p0 = invert_frequency(use_split->h, ps.target, guess, 1e-12);
      } catch (const std::exception&) {
        rec.status = ScanStatus::fail_inversion;
        rec.notes = ps.label + ";";
        out.records[i] = rec;
        continue;
      }

      double r0_point = cfg.r0;
      if (r0_point <= 0) {
        double d = use_split->singularity_distance(rec.p0);
        r0_point = std::isfinite(d) ? 0.5 * d : 1.0;
      }

      StabilityRecord opt = optimize_full(*use_split, rec.p0, r0_point, cfg.opt);
      opt.z = rec.z;
      opt.ray = rec.ray;
      opt.J = cfg.J;
      opt.notes = ps.label + ";" + opt.notes;

      if (opt.status == ScanStatus::success && !use_flows->empty()) {
        double cap = cfg.identity_cap_fraction * std::max(r0_point, opt.r);
        try {
          double dev = 0;
          for (int iq = 0; iq < 8; ++iq)
            for (int it3 = 0; it3 < 2; ++it3) {
              std::array<double, 3> p = opt.p0;
              std::array<double, 3> q{2 * M_PI * iq / 8.0, M_PI * it3,
                                      use_split->h.n == 3 ? 0.5 * M_PI * it3 : 0.0};
              auto [pb, qb] = back_transform(p, q, *use_flows, cap);
              double d2 = 0;
              for (int j = 0; j < use_split->h.n; ++j) d2 += (pb[j] - p[j]) * (pb[j] - p[j]);
              dev = std::max(dev, std::sqrt(d2));
            }
          opt.r_back = opt.r + 2 * dev;
        } catch (const NearResonanceRejection&) {
          opt.status = ScanStatus::fail_resonant;
          opt.notes += "back-transform-not-near-identity;";
        }
      } else if (opt.status == ScanStatus::success) {
        opt.r_back = opt.r;
      }
      out.records[i] = std::move(opt);
    }
  };

  unsigned nthreads = cfg.threads > 0 ? unsigned(cfg.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  if (nthreads <= 1 || pts.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // resonance-line metadata around the scan hull midpoint
  std::array<double, 3> hint{0, 0, 0};
  if (!pts.empty()) {
    for (const auto& p : pts) {
      auto g = normal_form_guess(h0, p.target);
      for (int j = 0; j < h0.n; ++j) hint[j] += g[j];
    }
    for (int j = 0; j < h0.n; ++j) hint[j] /= double(pts.size());
  }
  if (!cfg.per_point_normalization)
    out.lines = resonance_lines(cfg, r0, split, out.log, hint);

  // sampled verification of successes by direct integration
  if (cfg.verify_samples > 0) {
    std::vector<std::size_t> succ;
    for (std::size_t i = 0; i < out.records.size(); ++i)
      if (out.records[i].status == ScanStatus::success &&
          std::isfinite(out.records[i].T))
        succ.push_back(i);
    std::vector<std::size_t> chosen;
    if (!succ.empty()) {
      int m = std::min<int>(cfg.verify_samples, int(succ.size()));
      for (int j = 0; j < m; ++j) chosen.push_back(succ[std::size_t(j) * (succ.size() - 1) / std::max(1, m - 1)]);
      std::sort(chosen.begin(), chosen.end());
      chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    }
    ConstantCoefficientFlow flow(h0, r0);
    for (std::size_t i : chosen) {
      const StabilityRecord& rec = out.records[i];
      std::array<double, 3> p = rec.p0, q{0, 0, 0};
      if (!back_flows.empty()) {
        try {
          auto [pb, qb] = back_transform(p, q, back_flows, 0);
          p = pb;
          q = qb;
        } catch (const std::exception&) {
        }
      }
      VerificationRow row;
      row.record_index = int(i);
      row.bound = rec.r_back;
      row.report = verify_integration(flow, p, q, rec.r_back,
                                      std::min(rec.T, cfg.verify_budget), cfg.verify_rtol);
      out.verifications.push_back(row);
    }
  }

  out.normalized = std::move(split);
  out.chis = std::move(chis);
  return out;
}

}  // namespace resonest

#endif
