#include "cantor/json_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "cantor/error.hpp"

namespace cantor::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(Err::malformed_input, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object carrying \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing key \"") + key + "\"");
  return *it;
}

std::string str_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string("key \"") + key + "\" must be a string");
  return v.get<std::string>();
}

int64_t int_value(const json& v, const char* what) {
  if (!v.is_number_integer()) bad(std::string(what) + " must be an integer");
  return v.get<int64_t>();
}

int64_t int_field(const json& j, const char* key) { return int_value(field(j, key), key); }

int64_t int_field_or(const json& j, const char* key, int64_t fallback) {
  if (!j.is_object()) return fallback;
  auto it = j.find(key);
  return it == j.end() ? fallback : int_value(*it, key);
}

mpz_class big_value(const json& v, const char* what) {
  if (v.is_number_integer()) return mpz_class(static_cast<long>(v.get<int64_t>()));
  if (v.is_string()) {
    try {
      return mpz_class(v.get<std::string>(), 10);
    } catch (const std::invalid_argument&) {
      bad(std::string(what) + " is not a decimal integer");
    }
  }
  bad(std::string(what) + " must be an integer or a decimal string");
}

}  // namespace

json dyadic_json(const Dyadic& d) { return d.str(); }

Dyadic parse_dyadic(const json& j) {
  if (j.is_number_integer()) return Dyadic(static_cast<long>(j.get<int64_t>()));
  if (!j.is_string()) bad("dyadic values must be \"m/2^n\" strings");
  return Dyadic::parse(j.get<std::string>());
}

json bits_json(const Bits& x) { return x.str(); }

Bits parse_bits(const json& j) {
  if (!j.is_string()) bad("bit strings must be ASCII 0/1 strings");
  return Bits::parse(j.get<std::string>());
}

json string_set_json(const std::vector<Bits>& xs) {
  json out = json::array();
  for (const Bits& x : xs) out.push_back(x.str());
  return out;
}

std::vector<Bits> parse_string_set(const json& j) {
  if (!j.is_array()) bad("string sets must be arrays");
  std::vector<Bits> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(parse_bits(v));
  return out;
}

// --- orders ---------------------------------------------------------------

namespace {

json flags_json(const OrderFlags& fl) {
  json out = json::object();
  out["nondecreasing"] = fl.nondecreasing;
  out["strictly_increasing"] = fl.strictly_increasing;
  out["witness_horizon"] = fl.witness_horizon;
  return out;
}

}  // namespace

json order_json(const OrderFn& f) {
  json out = json::object();
  switch (f.kind()) {
    case OrderFn::Kind::closed_form: {
      out["kind"] = "closed_form";
      out["name"] = f.name();
      json params = json::object();
      for (const auto& [k, v] : f.params()) params[k] = v;
      out["params"] = std::move(params);
      break;
    }
    case OrderFn::Kind::table: {
      out["kind"] = "table";
      out["values"] = f.table_values();
      json ext = json::object();
      if (f.table_extension_affine()) {
        ext["mode"] = "affine";
        ext["slope"] = f.table_extension_slope();
      } else {
        ext["mode"] = "constant";
      }
      out["extension"] = std::move(ext);
      break;
    }
    case OrderFn::Kind::derived: {
      out["kind"] = "derived";
      out["label"] = f.name();
      out["samples"] = sample_order(f, 16);
      break;
    }
  }
  out["flags"] = flags_json(f.flags());
  return out;
}

OrderFn parse_order(const json& j) {
  const std::string kind = str_field(j, "kind");
  OrderFn f;
  if (kind == "closed_form") {
    const std::string name = str_field(j, "name");
    const json& params = field(j, "params");
    if (name == "affine")
      f = OrderFn::affine(int_field(params, "a"), int_field(params, "b"));
    else if (name == "constant")
      f = OrderFn::constant(int_field(params, "c"));
    else if (name == "floor_div")
      f = OrderFn::floor_div(int_field(params, "k"));
    else if (name == "ceil_div")
      f = OrderFn::ceil_div(int_field(params, "k"));
    else if (name == "power")
      f = OrderFn::power(int_field(params, "p"));
    else
      bad("unknown closed-form order \"" + name + "\"");
  } else if (kind == "table") {
    const json& values = field(j, "values");
    if (!values.is_array()) bad("order table values must be an array");
    std::vector<int64_t> vals;
    vals.reserve(values.size());
    for (const json& v : values) vals.push_back(int_value(v, "order table entry"));
    const json& ext = field(j, "extension");
    const std::string mode = str_field(ext, "mode");
    if (mode == "affine")
      f = OrderFn::table(std::move(vals), true, int_field_or(ext, "slope", 1));
    else if (mode == "constant")
      f = OrderFn::table(std::move(vals), false, 0);
    else
      bad("order table extension mode must be \"affine\" or \"constant\"");
  } else if (kind == "derived") {
    bad("derived orders are report output only and cannot be parsed back");
  } else {
    bad("order kind must be \"closed_form\" or \"table\"");
  }
  if (j.is_object() && j.contains("flags")) {
    const json& fl = j["flags"];
    if (fl.contains("nondecreasing") && fl["nondecreasing"].is_boolean() &&
        fl["nondecreasing"].get<bool>() && !f.flags().nondecreasing)
      bad("order declared nondecreasing but is not");
    if (fl.contains("strictly_increasing") && fl["strictly_increasing"].is_boolean() &&
        fl["strictly_increasing"].get<bool>() && !f.flags().strictly_increasing)
      bad("order declared strictly increasing but is not");
    if (fl.contains("witness_horizon")) f = f.with_horizon(int_value(fl["witness_horizon"], "witness_horizon"));
  }
  return f;
}

// --- martingales ------------------------------------------------------------

json savings_json(const SavingsMartingale& s) {
  json out = json::object();
  out["kind"] = "savings";
  out["base"] = martingale_json(s.base());
  out["f"] = order_json(s.f());
  out["n0"] = s.n0();
  return out;
}

json martingale_json(const Martingale& d) {
  json out = json::object();
  if (const auto* q = lln_view(d)) {
    out["kind"] = "lln";
    out["q"] = dyadic_json(*q);
    return out;
  }
  if (const auto* set = conditional_view(d)) {
    out["kind"] = "conditional";
    out["set"] = string_set_json(set->generators);
    return out;
  }
  if (const auto* table = table_view(d)) {
    out["kind"] = "table";
    json values = json::object();
    for (const auto& [x, v] : *table) values[x.str()] = dyadic_json(v);
    out["values"] = std::move(values);
    return out;
  }
  if (auto ws = weighted_sum_view(d)) {
    out["kind"] = "weighted_sum";
    json entries = json::array();
    for (const Martingale& e : *ws->battery) entries.push_back(martingale_json(e));
    out["entries"] = std::move(entries);
    return out;
  }
  if (auto rv = rounded_view(d)) {
    out["kind"] = "rounded";
    switch (rv->base_kind) {
      case RoundedBaseKind::exact:
        out["mode"] = "exact";
        out["base"] = martingale_json(*rv->base_martingale);
        break;
      case RoundedBaseKind::truncated:
        out["mode"] = "truncated";
        out["base"] = martingale_json(*rv->base_martingale);
        break;
      case RoundedBaseKind::savings:
        out["mode"] = "savings";
        out["base"] = savings_json(*rv->base_savings);
        break;
      case RoundedBaseKind::opaque:
        fail(Err::precondition_violated, "opaque rounded martingales have no serial form");
    }
    return out;
  }
  fail(Err::precondition_violated, "this martingale has no serial form");
}

namespace {

SavingsMartingale parse_savings(const json& j) {
  Martingale base = parse_martingale(field(j, "base"));
  OrderFn f = parse_order(field(j, "f"));
  return savings_transform(base, f, int_field(j, "n0"));
}

}  // namespace

MartingaleInput parse_martingale_input(const json& j) {
  const std::string kind = str_field(j, "kind");
  MartingaleInput out;
  if (kind == "lln") {
    out.dyadic = lln_martingale(parse_dyadic(field(j, "q")));
  } else if (kind == "conditional") {
    out.dyadic = conditional_martingale(make_clopen(parse_string_set(field(j, "set"))));
  } else if (kind == "table") {
    const json& values = field(j, "values");
    if (!values.is_object()) bad("table martingale values must map bit strings to dyadics");
    std::map<Bits, Dyadic> table;
    for (auto it = values.begin(); it != values.end(); ++it)
      table[Bits::parse(it.key())] = parse_dyadic(it.value());
    out.dyadic = table_martingale(std::move(table));
  } else if (kind == "weighted_sum") {
    const json& entries = field(j, "entries");
    if (!entries.is_array()) bad("weighted_sum entries must be an array");
    std::vector<Martingale> battery;
    for (const json& e : entries) battery.push_back(parse_martingale(e));
    out.dyadic = weighted_sum(battery);
  } else if (kind == "savings") {
    out.savings = parse_savings(j);
  } else if (kind == "rounded") {
    const json& base = field(j, "base");
    if (base.is_object() && base.contains("kind") && base["kind"].is_string() &&
        base["kind"].get<std::string>() == "savings") {
      out.dyadic = round_to_dyadic(parse_savings(base));
    } else {
      std::string mode = "exact";
      if (j.contains("mode")) {
        if (!j["mode"].is_string()) bad("rounded mode must be a string");
        mode = j["mode"].get<std::string>();
      }
      Martingale inner = parse_martingale(base);
      if (mode == "exact")
        out.dyadic = round_to_dyadic(approx_exact(inner));
      else if (mode == "truncated")
        out.dyadic = round_truncated(inner);
      else
        bad("rounded mode must be \"exact\", \"truncated\" or \"savings\"");
    }
  } else {
    bad("unknown martingale kind \"" + kind + "\"");
  }
  return out;
}

Martingale parse_martingale(const json& j) {
  MartingaleInput in = parse_martingale_input(j);
  if (in.savings)
    bad("savings martingales are rational-valued; wrap them in a rounded martingale");
  return *in.dyadic;
}

// --- machines ---------------------------------------------------------------

json machine_json(const MachineTable& m) {
  std::vector<MachineEntry> rows = m.entries();
  std::sort(rows.begin(), rows.end(),
            [](const MachineEntry& a, const MachineEntry& b) { return a.code < b.code; });
  json out = json::array();
  for (const MachineEntry& e : rows) {
    json row = json::object();
    row["code"] = e.code.str();
    row["out"] = e.out.str();
    row["t"] = e.halt_time;
    out.push_back(std::move(row));
  }
  return out;
}

MachineTable parse_machine(const json& j) {
  if (!j.is_array()) bad("machine tables must be arrays of {code, out, t} rows");
  std::vector<MachineEntry> rows;
  rows.reserve(j.size());
  for (const json& r : j)
    rows.push_back({parse_bits(field(r, "code")), parse_bits(field(r, "out")), int_field(r, "t")});
  return MachineTable(std::move(rows));
}

// --- staged families ----------------------------------------------------------

json family_json(const StagedTestFamily& fam) {
  json out = json::object();
  out["f"] = order_json(fam.f());
  out["n_max"] = fam.n_max();
  out["t_max"] = fam.t_max();
  json families = json::array();
  for (int64_t n = 0; n <= fam.n_max(); ++n) {
    auto adds = fam.additions(n);
    if (adds.empty()) continue;
    json stages = json::array();
    size_t i = 0;
    while (i < adds.size()) {
      const int64_t t = adds[i].first;
      json add = json::array();
      while (i < adds.size() && adds[i].first == t) add.push_back(adds[i++].second.str());
      json stage = json::object();
      stage["t"] = t;
      stage["add"] = std::move(add);
      stages.push_back(std::move(stage));
    }
    json entry = json::object();
    entry["n"] = n;
    entry["stages"] = std::move(stages);
    families.push_back(std::move(entry));
  }
  out["families"] = std::move(families);
  return out;
}

StagedTestFamily parse_family(const json& j) {
  OrderFn f = parse_order(field(j, "f"));
  const json& families = field(j, "families");
  if (!families.is_array()) bad("\"families\" must be an array");
  struct Add {
    int64_t n, t;
    Bits x;
  };
  std::vector<Add> adds;
  int64_t n_seen = 0, t_seen = 0;
  for (const json& entry : families) {
    const int64_t n = int_field(entry, "n");
    const json& stages = field(entry, "stages");
    if (!stages.is_array()) bad("\"stages\" must be an array");
    n_seen = std::max(n_seen, n);
    for (const json& stage : stages) {
      const int64_t t = int_field(stage, "t");
      t_seen = std::max(t_seen, t);
      for (const json& x : field(stage, "add")) adds.push_back({n, t, parse_bits(x)});
    }
  }
  const int64_t n_max = std::max(int_field_or(j, "n_max", 0), n_seen);
  const int64_t t_max = std::max(int_field_or(j, "t_max", 1), t_seen);
  StagedTestFamily fam(f, n_max, t_max);
  for (const Add& a : adds) fam.add(a.n, a.t, a.x);
  return fam;
}

// --- batteries ------------------------------------------------------------

json battery_json(const Battery& battery) {
  json out = json::array();
  for (const BatteryEntry& e : battery.entries()) {
    json entry = json::object();
    entry["d"] = martingale_json(e.d);
    entry["h"] = order_json(e.h_base);
    entry["tau"] = order_json(e.tau);
    out.push_back(std::move(entry));
  }
  return out;
}

Battery parse_battery(const json& j) {
  if (!j.is_array()) bad("batteries must be arrays of {d, h, tau} entries");
  std::vector<BatteryEntry> entries;
  int64_t e = 0;
  for (const json& entry : j) {
    BatteryEntry be;
    be.d = parse_martingale(field(entry, "d"));
    if (entry.is_object() && entry.contains("h"))
      be.h_base = parse_order(entry["h"]);
    else if (entry.is_object() && entry.contains("h_base"))
      be.h_base = parse_order(entry["h_base"]);
    else
      bad("battery entries need the declared success base under \"h\"");
    be.tau = (entry.is_object() && entry.contains("tau")) ? parse_order(entry["tau"]) : default_tau(e);
    entries.push_back(std::move(be));
    ++e;
  }
  return Battery(std::move(entries));
}

// --- requests ---------------------------------------------------------------

json requests_json(const std::vector<Request>& reqs) {
  json out = json::array();
  for (const Request& r : reqs) {
    json row = json::object();
    if (r.m) row["m"] = *r.m;
    row["len"] = r.len;
    row["payload"] = r.payload.str();
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Request> parse_requests(const json& j) {
  if (!j.is_array()) bad("request sets must be arrays");
  std::vector<Request> out;
  for (const json& r : j) {
    if (r.is_number_integer()) {
      out.push_back({std::nullopt, Bits{}, r.get<int64_t>()});
    } else if (r.is_object() && r.contains("m") && r.contains("x")) {
      const int64_t m = int_field(r, "m");
      Bits x = parse_bits(field(r, "x"));
      const int64_t len = static_cast<int64_t>(x.size()) - m + 1;
      if (len < 0) bad("scheduled request needs |x| >= m - 1");
      out.push_back({m, std::move(x), len});
    } else if (r.is_object() && r.contains("len")) {
      Bits payload = r.contains("payload") ? parse_bits(r["payload"]) : Bits{};
      std::optional<int64_t> m;
      if (r.contains("m")) m = int_field(r, "m");
      out.push_back({m, std::move(payload), int_field(r, "len")});
    } else {
      bad("requests must be lengths, {len, payload} or {m, x} objects");
    }
  }
  return out;
}

// --- sequences --------------------------------------------------------------

SequenceSource parse_sequence(const json& j) {
  const std::string kind = str_field(j, "kind");
  if (kind == "constant") return SequenceSource::constant(static_cast<int>(int_field(j, "bit")));
  if (kind == "periodic") return SequenceSource::periodic(parse_bits(field(j, "word")));
  if (kind == "concat_llex") return SequenceSource::concat_llex();
  if (kind == "rational")
    return SequenceSource::rational(big_value(field(j, "p"), "p"), big_value(field(j, "q"), "q"));
  if (kind == "bits") return SequenceSource::explicit_bits(parse_bits(field(j, "bits")));
  if (kind == "file") return SequenceSource::from_ascii(load_text_file(str_field(j, "path")));
  bad("unknown sequence kind \"" + kind + "\"");
}

// --- diagonal traces -----------------------------------------------------------

json trace_json(const DiagonalTrace& trace) {
  json out = json::object();
  out["horizon"] = trace.horizon;
  out["battery_size"] = trace.battery_size;
  out["bits"] = trace.bits.str();
  json case1 = json::array();
  for (bool c : trace.case1) case1.push_back(c ? 1 : 0);
  out["case1"] = std::move(case1);
  out["T"] = trace.T;
  json delta = json::array();
  for (const Dyadic& v : trace.delta) delta.push_back(v.str());
  out["delta"] = std::move(delta);
  json fv = json::array();
  for (const Dyadic& v : trace.F) fv.push_back(v.str());
  out["F"] = std::move(fv);
  return out;
}

DiagonalTrace parse_trace(const json& j) {
  DiagonalTrace trace;
  trace.horizon = int_field(j, "horizon");
  trace.battery_size = int_field(j, "battery_size");
  trace.bits = parse_bits(field(j, "bits"));
  if (trace.horizon < 0 || static_cast<int64_t>(trace.bits.size()) != trace.horizon)
    bad("trace bits must have exactly `horizon` entries");
  const json& case1 = field(j, "case1");
  const json& tj = field(j, "T");
  const json& dj = field(j, "delta");
  const json& fj = field(j, "F");
  if (!case1.is_array() || !tj.is_array() || !dj.is_array() || !fj.is_array())
    bad("trace arrays malformed");
  if (static_cast<int64_t>(case1.size()) != trace.horizon ||
      static_cast<int64_t>(tj.size()) != trace.horizon + 1 ||
      static_cast<int64_t>(dj.size()) != trace.horizon + 1 ||
      static_cast<int64_t>(fj.size()) != trace.horizon + 1)
    bad("trace arrays must cover the horizon");
  for (const json& c : case1) trace.case1.push_back(int_value(c, "case1 flag") != 0);
  for (const json& t : tj) trace.T.push_back(int_value(t, "T value"));
  for (const json& d : dj) trace.delta.push_back(parse_dyadic(d));
  for (const json& f : fj) trace.F.push_back(parse_dyadic(f));
  return trace;
}

// --- reports ----------------------------------------------------------------

json success_report_json(const SuccessReport& r) {
  json out = json::object();
  out["horizon"] = r.horizon;
  out["hits"] = r.hits;
  out["verdict_io"] = r.verdict_io;
  out["ae_tail"] = r.ae_tail ? json(*r.ae_tail) : json(nullptr);
  return out;
}

std::string success_report_csv(const SuccessReport& r) {
  std::ostringstream out;
  out << "i,hit\n";
  size_t next = 0;
  for (int64_t i = 0; i <= r.horizon; ++i) {
    const bool hit = next < r.hits.size() && r.hits[next] == i;
    if (hit) ++next;
    out << i << ',' << (hit ? 1 : 0) << '\n';
  }
  return out.str();
}

json family_report_json(const FamilyReport& r) {
  json out = json::object();
  out["pass"] = r.pass;
  out["strict"] = r.strict;
  json violations = json::array();
  for (const FamilyViolation& v : r.violations) {
    json row = json::object();
    row["check"] = v.check;
    row["n"] = v.n;
    row["i"] = v.i;
    row["detail"] = v.detail;
    violations.push_back(std::move(row));
  }
  out["violations"] = std::move(violations);
  return out;
}

json control_witness_json(const ControlWitness& w) {
  json out = json::object();
  out["imax"] = w.imax;
  json residuals = json::array();
  for (const Dyadic& r : w.residuals) residuals.push_back(r.str());
  out["residuals"] = std::move(residuals);
  out["violated"] = w.violated ? json(*w.violated) : json(nullptr);
  out["ok"] = w.ok();
  return out;
}

json kc_result_json(const KCResult& kc) {
  json out = json::object();
  out["gamma"] = kc.gamma.str();
  out["omega"] = kc.table.omega().str();
  json codes = json::array();
  for (const KCStep& s : kc.steps) codes.push_back(s.code.str());
  out["codes"] = std::move(codes);
  json steps = json::array();
  int64_t index = 0;
  for (const KCStep& s : kc.steps) {
    json row = json::object();
    row["index"] = index++;
    if (s.req.m) row["m"] = *s.req.m;
    row["len"] = s.req.len;
    row["payload"] = s.req.payload.str();
    row["z"] = s.z.str();
    row["code"] = s.code.str();
    row["halt"] = s.halt_time;
    row["residual"] = string_set_json(s.residual);
    steps.push_back(std::move(row));
  }
  out["steps"] = std::move(steps);
  out["table"] = machine_json(kc.table);
  return out;
}

json hit_report_json(const HitReport& r) {
  json out = json::object();
  out["g0"] = r.g0;
  out["ok"] = r.ok;
  json rows = json::array();
  for (const HitRow& row : r.rows) {
    json rj = json::object();
    rj["n"] = row.n;
    rj["i"] = row.i_n;
    rj["h"] = row.h_i;
    rj["B"] = row.b_value.str();
    rj["asserted"] = row.asserted;
    rj["pass"] = row.pass;
    rows.push_back(std::move(rj));
  }
  out["rows"] = std::move(rows);
  return out;
}

json trace_report_json(const TraceReport& r) {
  json out = json::object();
  out["ok"] = r.ok;
  out["determinism"] = r.rebuilt_match;
  json claim3 = json::object();
  claim3["pass"] = r.claim3_ok;
  claim3["fail_index"] = r.claim3_fail ? json(*r.claim3_fail) : json(nullptr);
  out["claim3"] = std::move(claim3);
  out["f_shape"] = r.f_shape_ok;
  out["case1_count"] = r.case1_count;
  json entries = json::array();
  for (const EntryClaims& e : r.entries) {
    json row = json::object();
    row["e"] = e.e;
    row["chain"] = e.chain_ok;
    json c4 = json::object();
    c4["pass"] = e.claim4_ok;
    c4["from"] = e.claim4_from ? json(*e.claim4_from) : json(nullptr);
    row["claim4"] = std::move(c4);
    json c5 = json::object();
    c5["exists"] = e.claim5_tail_exists;
    c5["tail"] = e.claim5_tail ? json(*e.claim5_tail) : json(nullptr);
    row["claim5"] = std::move(c5);
    entries.push_back(std::move(row));
  }
  out["entries"] = std::move(entries);
  return out;
}

// --- files ------------------------------------------------------------------

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("JSON parse failure in \"" + path + "\": " + e.what());
  }
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open \"" + path + "\"");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::precondition_violated, "cannot write \"" + path + "\"");
  out << text;
}

}  // namespace cantor::io
