#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cantor/diagonal.hpp"
#include "cantor/error.hpp"
#include "cantor/family.hpp"
#include "cantor/json_io.hpp"
#include "cantor/kraft.hpp"
#include "cantor/machine.hpp"
#include "cantor/martingale.hpp"
#include "cantor/sequence.hpp"

namespace {

using cantor::Bits;
using cantor::Dyadic;
using json = cantor::io::json;

// Shared report state: an envelope with echoed inputs, a check list and a
// result payload. Asserted checks drive the exit code; advisory ones do not.
struct Report {
  json envelope = json::object();
  bool ok = true;
  std::string csv;  // per-index tabular form, when the command has one

  explicit Report(const std::string& command, std::int64_t seed) {
    envelope["command"] = command;
    envelope["seed"] = seed;
    envelope["inputs"] = json::object();
    envelope["checks"] = json::array();
    envelope["result"] = json::object();
  }

  void echo(const std::string& name, json value) { envelope["inputs"][name] = std::move(value); }

  void check(const std::string& tag, bool pass, json detail = json::object(), bool asserted = true) {
    json row = json::object();
    row["tag"] = tag;
    row["pass"] = pass;
    if (!asserted) row["advisory"] = true;
    for (auto it = detail.begin(); it != detail.end(); ++it) row[it.key()] = it.value();
    envelope["checks"].push_back(std::move(row));
    if (asserted && !pass) ok = false;
  }

  json& result() { return envelope["result"]; }
};

struct CommonFlags {
  std::int64_t horizon = 64;
  std::int64_t depth = 8;
  std::int64_t seed = 0;
  std::string format = "json";
  std::string out_path;
};

void attach_common(CLI::App* cmd, CommonFlags& fl) {
  cmd->add_option("--horizon", fl.horizon, "index horizon for per-position scans");
  cmd->add_option("--depth", fl.depth, "tree depth for exhaustive scans");
  cmd->add_option("--seed", fl.seed, "seed echoed into the report");
  cmd->add_option("--format", fl.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", fl.out_path, "write the report to this file instead of stdout");
}

int finish(Report& rep, const CommonFlags& fl) {
  std::string text;
  if (fl.format == "csv") {
    if (rep.csv.empty())
      cantor::fail(cantor::Err::malformed_input, "this command has no per-index tabular output");
    text = rep.csv;
  } else {
    text = rep.envelope.dump(2) + "\n";
  }
  if (fl.out_path.empty())
    std::cout << text;
  else
    cantor::io::write_text_file(fl.out_path, text);
  return rep.ok ? 0 : 1;
}

// --- fairness-check -----------------------------------------------------------

int run_fairness(const std::string& mart_path, const CommonFlags& fl) {
  Report rep("fairness-check", fl.seed);
  const json mj = cantor::io::load_json_file(mart_path);
  rep.echo("martingale", mj);
  auto input = cantor::io::parse_martingale_input(mj);
  json detail = json::object();
  detail["depth"] = fl.depth;
  if (input.savings) {
    auto fr = cantor::check_fairness(*input.savings, fl.depth);
    detail["witness"] = fr.witness ? json(fr.witness->str()) : json(nullptr);
    rep.check("fairness", fr.ok, detail);
    rep.result()["initial"] = input.savings->at(Bits{}).str();
  } else {
    auto fr = cantor::check_fairness(*input.dyadic, fl.depth);
    detail["witness"] = fr.witness ? json(fr.witness->str()) : json(nullptr);
    rep.check("fairness", fr.ok, detail);
    rep.result()["initial"] = input.dyadic->initial().str();
  }
  return finish(rep, fl);
}

// --- kc build -----------------------------------------------------------------

void kc_common_checks(Report& rep, const cantor::KCResult& kc) {
  json req_detail = json::object();
  req_detail["gamma"] = kc.gamma.str();
  rep.check("request", kc.gamma <= Dyadic(1), req_detail);

  std::vector<Bits> codes;
  for (const auto& s : kc.steps) codes.push_back(s.code);
  const bool pf = cantor::is_prefix_free(codes);
  json prop_detail = json::object();
  prop_detail["omega"] = kc.table.omega().str();
  rep.check("prop-KC", pf && kc.table.omega() == kc.gamma, prop_detail);
}

int run_kc_build(const std::string& requests_path, const std::string& family_path,
                 const std::string& emit_path, std::int64_t imax, const CommonFlags& fl) {
  Report rep("kc-build", fl.seed);
  cantor::KCResult kc;
  if (!requests_path.empty()) {
    const json rj = cantor::io::load_json_file(requests_path);
    rep.echo("requests", rj);
    auto reqs = cantor::io::parse_requests(rj);
    kc = cantor::kc_assign(reqs);
    kc_common_checks(rep, kc);
    bool replay_ok = true;
    for (const auto& s : kc.steps) {
      auto got = cantor::kc_replay(reqs, s.code);
      if (!got || !(*got == s.req.payload)) replay_ok = false;
    }
    rep.check("claim-R-encoded", replay_ok);
  } else {
    const json fj = cantor::io::load_json_file(family_path);
    rep.echo("family", fj);
    auto fam = cantor::io::parse_family(fj);
    kc = cantor::build_machine_from_test(fam);
    kc_common_checks(rep, kc);

    bool replay_ok = true;
    for (const auto& s : kc.steps) {
      auto got = cantor::kc_replay_stratified(fam, s.code);
      if (!got || !(*got == s.req.payload)) replay_ok = false;
    }
    rep.check("algo", replay_ok);

    // Strata are initial segments of the scheduled request order, and the
    // pair (m, x) is visible no later than budget |x| - m + 1.
    auto full = cantor::family_requests(fam);
    bool initial_segments = true;
    std::int64_t r_hi = 0;
    for (const auto& r : full) r_hi = std::max(r_hi, r.len);
    for (std::int64_t r = 0; r <= r_hi + 1 && initial_segments; ++r) {
      auto st = cantor::stratum(fam, r);
      if (st.size() > full.size()) initial_segments = false;
      for (size_t i = 0; i < st.size() && initial_segments; ++i)
        if (!(st[i].m == full[i].m && st[i].payload == full[i].payload)) initial_segments = false;
    }
    rep.check("lemma-strat1", initial_segments);
    bool budget_visible = true;
    for (const auto& r : full) {
      auto st = cantor::stratum(fam, r.len);
      bool found = false;
      for (const auto& s : st)
        if (s.m == r.m && s.payload == r.payload) found = true;
      if (!found) budget_visible = false;
    }
    rep.check("lemma-strat2", budget_visible);

    auto h = cantor::coverage_order(fam, kc);
    auto witness = cantor::verify_measure_computable(kc.table, h, imax);
    json gf = json::object();
    gf["control"] = cantor::io::control_witness_json(witness);
    rep.check("goal-fact", witness.ok(), gf);
    rep.result()["coverage_order"] = cantor::io::order_json(h);
    rep.result()["stratum_sizes"] = cantor::sample_order(cantor::stratum_size_order(fam), r_hi + 2);
  }
  rep.result()["construction"] = cantor::io::kc_result_json(kc);
  if (!emit_path.empty())
    cantor::io::write_text_file(emit_path, cantor::io::machine_json(kc.table).dump(2) + "\n");
  return finish(rep, fl);
}

// --- convert test-to-mart -------------------------------------------------------

int run_test_to_mart(const std::string& family_path, const std::string& sequence_path,
                     const CommonFlags& fl) {
  Report rep("convert-test-to-mart", fl.seed);
  const json fj = cantor::io::load_json_file(family_path);
  rep.echo("family", fj);
  auto fam = cantor::io::parse_family(fj);
  auto bundle = cantor::test_to_martingale(fam);

  const std::int64_t fair_depth = std::min<std::int64_t>(fl.depth, 6);
  auto fr = cantor::check_fairness(bundle.B, fair_depth);
  json fair_detail = json::object();
  fair_detail["depth"] = fair_depth;
  rep.check("Bmart", fr.ok, fair_detail);

  std::vector<Bits> samples;
  if (!sequence_path.empty()) {
    const json sj = cantor::io::load_json_file(sequence_path);
    rep.echo("sequence", sj);
    auto xi = cantor::io::parse_sequence(sj);
    for (std::int64_t i = 0; i <= std::min<std::int64_t>(fl.horizon, 8); ++i)
      samples.push_back(xi.prefix(i));
    auto hits = cantor::hitting_witness(bundle, xi, fl.horizon);
    json hd = json::object();
    hd["report"] = cantor::io::hit_report_json(hits);
    rep.check("intersec", hits.ok, hd);
  } else {
    for (std::int64_t len = 0; len <= 3; ++len)
      for (const Bits& x : cantor::all_strings(len)) samples.push_back(x);
  }

  bool prem = true, deux = true, trois = true, bapprox = true;
  for (const Bits& x : samples) {
    const Dyadic bx = bundle.B.at(x);
    for (std::int64_t i = 0; i <= 4; ++i) {
      const Dyadic b1 = bundle.B1(x, i), b2 = bundle.B2(x, i), fxi = bundle.F(x, i);
      const Dyadic d1 = bx - b1, d2 = b1 - b2, d3 = b2 - fxi, d4 = bx - fxi;
      if (d1.sign() < 0 || d1 > Dyadic::pow2(-i - 2)) prem = false;
      if (d2.sign() < 0 || d2 > Dyadic::pow2(-i - 2)) deux = false;
      if (d3.sign() < 0 || d3 > Dyadic::pow2(-i - 1)) trois = false;
      if (d4.sign() < 0 || d4 > Dyadic::pow2(-i)) bapprox = false;
    }
  }
  json sd = json::object();
  sd["samples"] = static_cast<std::int64_t>(samples.size() * 5);
  rep.check("prem", prem, sd);
  rep.check("deux", deux, sd);
  rep.check("trois", trois, sd);
  rep.check("B-approx", bapprox, sd);

  rep.result()["B_initial"] = bundle.B.initial().str();
  rep.result()["k_cut"] = bundle.k_cut;
  rep.result()["reindexed"] = bundle.reindexed;
  rep.result()["g"] = cantor::io::order_json(bundle.g);
  rep.result()["h"] = cantor::io::order_json(bundle.h);
  return finish(rep, fl);
}

// --- convert mart-to-test -------------------------------------------------------

int run_mart_to_test(const std::string& mart_path, const std::string& order_path, std::int64_t n_max,
                     const CommonFlags& fl) {
  Report rep("convert-mart-to-test", fl.seed);
  const json mj = cantor::io::load_json_file(mart_path);
  const json oj = cantor::io::load_json_file(order_path);
  rep.echo("martingale", mj);
  rep.echo("order", oj);
  auto d = cantor::io::parse_martingale(mj);
  auto g = cantor::io::parse_order(oj);
  auto fam = cantor::martingale_to_test(d, g, n_max, fl.depth);

  auto report = cantor::verify_family(fam, false);
  json md = json::object();
  md["family_report"] = cantor::io::family_report_json(report);
  rep.check("mart-to-ML", report.pass, md);

  bool ville = true;
  json measures = json::array();
  for (std::int64_t n = 0; n <= fam.n_max(); ++n) {
    const Dyadic mu = cantor::measure(cantor::make_clopen(fam.limit(n)));
    measures.push_back(mu.str());
    if (mu > Dyadic::pow2(-n)) ville = false;
  }
  json td = json::object();
  td["measures"] = std::move(measures);
  rep.check("tertio", ville, td);

  rep.result()["family"] = cantor::io::family_json(fam);
  rep.result()["control"] = cantor::io::order_json(fam.f());
  return finish(rep, fl);
}

// --- machine omega / k / rb -----------------------------------------------------

int run_machine_omega(const std::string& machine_path, std::optional<std::int64_t> at,
                      const std::string& order_path, std::int64_t imax, const CommonFlags& fl) {
  Report rep("machine-omega", fl.seed);
  const json mj = cantor::io::load_json_file(machine_path);
  rep.echo("machine", mj);
  auto m = cantor::io::parse_machine(mj);
  rep.result()["omega"] = m.omega().str();
  rep.result()["max_halt"] = m.max_halt_time();
  if (at) {
    rep.result()["at"] = *at;
    rep.result()["omega_at"] = m.omega_at(*at).str();
  }
  json staircase = json::array();
  for (std::int64_t t = 0; t <= m.max_halt_time(); ++t) {
    json row = json::object();
    row["t"] = t;
    row["omega_t"] = m.omega_at(t).str();
    staircase.push_back(std::move(row));
  }
  rep.result()["staircase"] = std::move(staircase);
  if (!order_path.empty()) {
    const json oj = cantor::io::load_json_file(order_path);
    rep.echo("order", oj);
    auto g = cantor::io::parse_order(oj);
    auto witness = cantor::verify_measure_computable(m, g, imax);
    json cd = json::object();
    cd["control"] = cantor::io::control_witness_json(witness);
    rep.check("defi-c-measure", witness.ok(), cd);
  }
  return finish(rep, fl);
}

int run_machine_k(const std::string& machine_path, const std::string& x_text,
                  const std::string& sequence_path, std::optional<std::int64_t> at,
                  const CommonFlags& fl) {
  Report rep("machine-k", fl.seed);
  const json mj = cantor::io::load_json_file(machine_path);
  rep.echo("machine", mj);
  auto m = cantor::io::parse_machine(mj);
  std::optional<std::int64_t> stage;
  if (at) stage = *at;
  if (!x_text.empty()) {
    Bits x = Bits::parse(x_text);
    rep.echo("x", x.str());
    auto k = m.complexity(x, stage);
    rep.result()["K"] = k ? json(*k) : json(nullptr);
    rep.csv = "x,K\n" + x.str() + "," + (k ? std::to_string(*k) : std::string()) + "\n";
  } else {
    const json sj = cantor::io::load_json_file(sequence_path);
    rep.echo("sequence", sj);
    auto xi = cantor::io::parse_sequence(sj);
    json rows = json::array();
    std::string csv = "i,K\n";
    for (std::int64_t i = 0; i <= fl.horizon; ++i) {
      auto k = m.complexity(xi.prefix(i), stage);
      json row = json::object();
      row["i"] = i;
      row["K"] = k ? json(*k) : json(nullptr);
      rows.push_back(std::move(row));
      csv += std::to_string(i) + "," + (k ? std::to_string(*k) : std::string()) + "\n";
    }
    rep.result()["rows"] = std::move(rows);
    auto margin = cantor::kolmogorov_margin(m, xi, fl.horizon);
    json kmd = json::object();
    kmd["margin"] = margin ? json(*margin) : json(nullptr);
    rep.check("KM", true, kmd, /*asserted=*/false);
    rep.result()["margin"] = margin ? json(*margin) : json(nullptr);
    rep.csv = std::move(csv);
  }
  return finish(rep, fl);
}

int run_machine_rb(const std::string& machine_path, std::int64_t b, std::int64_t maxlen,
                   const std::string& order_path, const CommonFlags& fl) {
  Report rep("machine-rb", fl.seed);
  const json mj = cantor::io::load_json_file(machine_path);
  rep.echo("machine", mj);
  auto m = cantor::io::parse_machine(mj);
  auto unstaged = cantor::compression_set(m, b, maxlen);
  const Dyadic mu = cantor::measure(unstaged);
  json kd = json::object();
  kd["measure"] = mu.str();
  rep.check("KM", !(mu > Dyadic::pow2(-b)), kd);
  rep.result()["generators"] = cantor::io::string_set_json(unstaged.generators);
  rep.result()["measure"] = mu.str();
  if (!order_path.empty()) {
    const json oj = cantor::io::load_json_file(order_path);
    rep.echo("order", oj);
    auto g = cantor::io::parse_order(oj);
    auto staged = cantor::compression_set(m, b, maxlen, g);
    const auto& su = unstaged.generators;
    bool contained = true;
    for (const Bits& x : staged.generators)
      if (!cantor::string_set_contains(su, x)) contained = false;
    json sd = json::object();
    sd["staged_size"] = static_cast<std::int64_t>(staged.generators.size());
    rep.check("KM-staged-contained", contained, sd);
    rep.check("KM-staged-equal", staged.generators == su, json::object(), /*asserted=*/false);
    rep.result()["staged_generators"] = cantor::io::string_set_json(staged.generators);
  }
  return finish(rep, fl);
}

// --- diagonalize / verify trace --------------------------------------------------

void trace_checks(Report& rep, const cantor::TraceReport& tr, std::int64_t horizon) {
  rep.check("determinism", tr.rebuilt_match);
  json c3 = json::object();
  c3["fail_index"] = tr.claim3_fail ? json(*tr.claim3_fail) : json(nullptr);
  rep.check("claim3", tr.claim3_ok, c3);
  rep.check("claim2", tr.f_shape_ok);
  bool chain = true, claim4 = true, claim5 = true;
  for (const auto& e : tr.entries) {
    chain = chain && e.chain_ok;
    claim4 = claim4 && e.claim4_ok;
    claim5 = claim5 && e.claim5_tail_exists;
  }
  rep.check("phi-chain", chain);
  rep.check("claim4", claim4);
  rep.check("claim5", claim5);
  json c1 = json::object();
  c1["case1_count"] = tr.case1_count;
  c1["reference"] = horizon / 512;
  rep.check("claim1", tr.case1_count >= std::max<std::int64_t>(horizon / 512, 1), c1,
            /*asserted=*/false);
}

int run_diagonalize(const std::string& battery_path, const std::string& emit_path,
                    const CommonFlags& fl) {
  Report rep("diagonalize", fl.seed);
  const json bj = cantor::io::load_json_file(battery_path);
  rep.echo("battery", bj);
  auto battery = cantor::io::parse_battery(bj);
  auto trace = cantor::build_path(battery, fl.horizon);
  auto tr = cantor::verify_path(battery, trace);
  trace_checks(rep, tr, fl.horizon);
  rep.result()["trace"] = cantor::io::trace_json(trace);
  rep.result()["report"] = cantor::io::trace_report_json(tr);
  if (!emit_path.empty())
    cantor::io::write_text_file(emit_path, cantor::io::trace_json(trace).dump(2) + "\n");
  return finish(rep, fl);
}

int run_verify_trace(const std::string& battery_path, const std::string& trace_path,
                     const CommonFlags& fl) {
  Report rep("verify-trace", fl.seed);
  const json bj = cantor::io::load_json_file(battery_path);
  rep.echo("battery", bj);
  auto battery = cantor::io::parse_battery(bj);
  json tj = cantor::io::load_json_file(trace_path);
  if (tj.is_object() && tj.contains("result") && tj["result"].is_object() &&
      tj["result"].contains("trace"))
    tj = tj["result"]["trace"];  // accept a full diagonalize report
  auto trace = cantor::io::parse_trace(tj);
  auto tr = cantor::verify_path(battery, trace);
  trace_checks(rep, tr, trace.horizon);
  rep.result()["report"] = cantor::io::trace_report_json(tr);
  return finish(rep, fl);
}

// --- battery run ------------------------------------------------------------

int run_battery(const std::string& battery_path, const std::vector<std::string>& sequence_paths,
                const CommonFlags& fl) {
  Report rep("battery-run", fl.seed);
  const json bj = cantor::io::load_json_file(battery_path);
  rep.echo("battery", bj);
  auto battery = cantor::io::parse_battery(bj);
  std::vector<cantor::SequenceSource> sources;
  json seq_echo = json::array();
  for (const auto& p : sequence_paths) {
    const json sj = cantor::io::load_json_file(p);
    seq_echo.push_back(sj);
    sources.push_back(cantor::io::parse_sequence(sj));
  }
  rep.echo("sequences", seq_echo);
  json matrix = json::array();
  std::string csv = "entry,source,i,hit\n";
  for (size_t e = 0; e < battery.size(); ++e) {
    const auto& entry = battery.entries()[e];
    auto h = cantor::inverse_order(entry.h_base);
    for (size_t s = 0; s < sources.size(); ++s) {
      auto report = cantor::success_report(entry.d, h, sources[s], fl.horizon);
      json cell = json::object();
      cell["entry"] = static_cast<std::int64_t>(e);
      cell["source"] = sources[s].describe();
      cell["report"] = cantor::io::success_report_json(report);
      matrix.push_back(std::move(cell));
      size_t next = 0;
      for (std::int64_t i = 0; i <= report.horizon; ++i) {
        const bool hit = next < report.hits.size() && report.hits[next] == i;
        if (hit) ++next;
        csv += std::to_string(e) + "," + std::to_string(s) + "," + std::to_string(i) + "," +
               (hit ? "1" : "0") + "\n";
      }
    }
  }
  rep.result()["matrix"] = std::move(matrix);
  rep.csv = std::move(csv);
  return finish(rep, fl);
}

// --- verify family ------------------------------------------------------------

int run_verify_family(const std::string& family_path, bool strict, const CommonFlags& fl) {
  Report rep("verify-family", fl.seed);
  const json fj = cantor::io::load_json_file(family_path);
  rep.echo("family", fj);
  auto fam = cantor::io::parse_family(fj);
  auto report = cantor::verify_family(fam, strict);

  std::vector<std::string> names = {"order-flags", "prefix-free", "stage-length", "monotone",
                                    "def-ML-test"};
  if (strict) names.push_back("measure-2n");
  for (const auto& name : names) {
    json rows = json::array();
    for (const auto& v : report.violations)
      if (v.check == name) {
        json row = json::object();
        row["n"] = v.n;
        row["i"] = v.i;
        row["detail"] = v.detail;
        rows.push_back(std::move(row));
      }
    json detail = json::object();
    const bool pass = rows.empty();
    detail["violations"] = std::move(rows);
    rep.check(name, pass, detail);
  }

  if (fam.t_max() <= 12) {
    bool hull_ok = true;
    json hulls = json::array();
    for (std::int64_t n = 0; n <= std::min<std::int64_t>(fam.n_max(), 3); ++n) {
      auto hull = cantor::prefix_free_stages(fam, n, fam.t_max());
      json row = json::object();
      row["n"] = n;
      row["antichain"] = hull.antichain;
      row["staged_inclusion"] = hull.staged_inclusion_ok;
      row["limit_equal"] = hull.limit_equal;
      row["slice_mismatch"] = hull.slice_mismatch;
      hulls.push_back(std::move(row));
      hull_ok = hull_ok && hull.antichain && hull.staged_inclusion_ok && hull.limit_equal;
    }
    json detail = json::object();
    detail["per_n"] = std::move(hulls);
    rep.check("claim-pf-quadra", hull_ok, detail);
  }

  rep.result()["report"] = cantor::io::family_report_json(report);
  return finish(rep, fl);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact martingales, staged tests and prefix-free machine tables"};
  app.require_subcommand(1);

  // fairness-check
  CommonFlags fair_fl;
  std::string fair_mart;
  auto* fair = app.add_subcommand("fairness-check", "exact fairness scan of a martingale");
  fair->add_option("--martingale", fair_mart, "martingale JSON file")->required();
  attach_common(fair, fair_fl);

  // kc build
  CommonFlags kc_fl;
  std::string kc_requests, kc_family, kc_emit;
  std::int64_t kc_imax = 8;
  auto* kc = app.add_subcommand("kc", "codeword assignment");
  auto* kc_build = kc->add_subcommand("build", "run the residual-splitting construction");
  kc_build->add_option("--requests", kc_requests, "request set JSON file");
  kc_build->add_option("--family", kc_family, "staged family JSON file");
  kc_build->add_option("--emit", kc_emit, "write the machine table to this file");
  kc_build->add_option("--imax", kc_imax, "staged-control indices to verify");
  attach_common(kc_build, kc_fl);

  // convert
  CommonFlags t2m_fl, m2t_fl;
  t2m_fl.horizon = 32;
  m2t_fl.depth = 12;
  std::string t2m_family, t2m_sequence, m2t_mart, m2t_order;
  std::int64_t m2t_n = 4;
  auto* convert = app.add_subcommand("convert", "test/martingale conversions");
  auto* t2m = convert->add_subcommand("test-to-mart", "betting strategy from a staged family");
  t2m->add_option("--family", t2m_family, "staged family JSON file")->required();
  t2m->add_option("--sequence", t2m_sequence, "sequence descriptor JSON file");
  attach_common(t2m, t2m_fl);
  auto* m2t = convert->add_subcommand("mart-to-test", "staged family from a martingale");
  m2t->add_option("--martingale", m2t_mart, "martingale JSON file")->required();
  m2t->add_option("--order", m2t_order, "success order (strictly increasing base) JSON file")
      ->required();
  m2t->add_option("--n", m2t_n, "largest test index");
  attach_common(m2t, m2t_fl);

  // machine
  CommonFlags mo_fl, mk_fl, mrb_fl;
  std::string mo_machine, mo_order, mk_machine, mk_x, mk_sequence, mrb_machine, mrb_order;
  std::int64_t mo_at = -1, mk_at = -1, mo_imax = 8, mrb_b = 1, mrb_maxlen = 8;
  auto* machine = app.add_subcommand("machine", "prefix-free table queries");
  auto* momega = machine->add_subcommand("omega", "halting weight and its staircase");
  momega->add_option("--machine", mo_machine, "machine table JSON file")->required();
  momega->add_option("--at", mo_at, "stage for a single staircase query");
  momega->add_option("--order", mo_order, "staging order JSON file for the control check");
  momega->add_option("--imax", mo_imax, "control indices to verify");
  attach_common(momega, mo_fl);
  auto* mk = machine->add_subcommand("k", "codeword complexity");
  mk->add_option("--machine", mk_machine, "machine table JSON file")->required();
  mk->add_option("--x", mk_x, "single string to measure");
  mk->add_option("--sequence", mk_sequence, "sequence descriptor JSON file");
  mk->add_option("--at", mk_at, "stage bound for the staged complexity");
  attach_common(mk, mk_fl);
  auto* mrb = machine->add_subcommand("rb", "compression set at margin b");
  mrb->add_option("--machine", mrb_machine, "machine table JSON file")->required();
  mrb->add_option("--b", mrb_b, "compression margin");
  mrb->add_option("--maxlen", mrb_maxlen, "longest string scanned");
  mrb->add_option("--order", mrb_order, "staging order JSON file");
  attach_common(mrb, mrb_fl);

  // diagonalize
  CommonFlags diag_fl;
  diag_fl.horizon = 256;
  std::string diag_battery, diag_emit;
  auto* diag = app.add_subcommand("diagonalize", "build the defeating path for a battery");
  diag->add_option("--battery", diag_battery, "battery JSON file")->required();
  diag->add_option("--emit", diag_emit, "write the bare trace to this file");
  attach_common(diag, diag_fl);

  // battery run
  CommonFlags brun_fl;
  std::string brun_battery;
  std::vector<std::string> brun_sequences;
  auto* battery = app.add_subcommand("battery", "battery-wide reports");
  auto* brun = battery->add_subcommand("run", "success reports over battery x sources");
  brun->add_option("--battery", brun_battery, "battery JSON file")->required();
  brun->add_option("--sequence", brun_sequences, "sequence descriptor JSON file (repeatable)")
      ->required();
  attach_common(brun, brun_fl);

  // verify
  CommonFlags vfam_fl, vtrace_fl;
  std::string vfam_family, vtrace_battery, vtrace_trace;
  bool vfam_strict = false;
  auto* verify = app.add_subcommand("verify", "re-check reports and inputs");
  auto* vfam = verify->add_subcommand("family", "staged-test obligations");
  vfam->add_option("--family", vfam_family, "staged family JSON file")->required();
  vfam->add_flag("--strict", vfam_strict, "require the doubled measure bound");
  attach_common(vfam, vfam_fl);
  auto* vtrace = verify->add_subcommand("trace", "re-check a diagonal trace");
  vtrace->add_option("--battery", vtrace_battery, "battery JSON file")->required();
  vtrace->add_option("--trace", vtrace_trace, "trace JSON file (bare or full report)")->required();
  attach_common(vtrace, vtrace_fl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fair->parsed()) return run_fairness(fair_mart, fair_fl);
    if (kc_build->parsed()) {
      if (kc_requests.empty() == kc_family.empty())
        cantor::fail(cantor::Err::malformed_input,
                     "kc build needs exactly one of --requests or --family");
      return run_kc_build(kc_requests, kc_family, kc_emit, kc_imax, kc_fl);
    }
    if (t2m->parsed()) return run_test_to_mart(t2m_family, t2m_sequence, t2m_fl);
    if (m2t->parsed()) return run_mart_to_test(m2t_mart, m2t_order, m2t_n, m2t_fl);
    if (momega->parsed())
      return run_machine_omega(mo_machine, mo_at >= 0 ? std::optional<std::int64_t>(mo_at) : std::nullopt,
                               mo_order, mo_imax, mo_fl);
    if (mk->parsed()) {
      if (mk_x.empty() == mk_sequence.empty())
        cantor::fail(cantor::Err::malformed_input,
                     "machine k needs exactly one of --x or --sequence");
      return run_machine_k(mk_machine, mk_x, mk_sequence,
                           mk_at >= 0 ? std::optional<std::int64_t>(mk_at) : std::nullopt, mk_fl);
    }
    if (mrb->parsed()) return run_machine_rb(mrb_machine, mrb_b, mrb_maxlen, mrb_order, mrb_fl);
    if (diag->parsed()) return run_diagonalize(diag_battery, diag_emit, diag_fl);
    if (brun->parsed()) return run_battery(brun_battery, brun_sequences, brun_fl);
    if (vfam->parsed()) return run_verify_family(vfam_family, vfam_strict, vfam_fl);
    if (vtrace->parsed()) return run_verify_trace(vtrace_battery, vtrace_trace, vtrace_fl);
    cantor::fail(cantor::Err::malformed_input, "no command selected");
  } catch (const cantor::Error& e) {
    std::cerr << "error [" << cantor::err_name(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == cantor::Err::malformed_input ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
