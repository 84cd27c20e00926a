#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cantor/diagonal.hpp"
#include "cantor/family.hpp"
#include "cantor/generate.hpp"
#include "cantor/kraft.hpp"
#include "cantor/machine.hpp"
#include "cantor/martingale.hpp"
#include "cantor/sequence.hpp"

namespace cantor::io {

using json = nlohmann::ordered_json;

// Every parse_* rejects schema violations with a malformed-input error whose
// message names the offending key. Serializers emit deterministic key order.

json dyadic_json(const Dyadic& d);
Dyadic parse_dyadic(const json& j);

json bits_json(const Bits& x);
Bits parse_bits(const json& j);

json string_set_json(const std::vector<Bits>& xs);
std::vector<Bits> parse_string_set(const json& j);

json order_json(const OrderFn& f);
OrderFn parse_order(const json& j);

// A bare "savings" definition parses to the rational-valued transform; every
// other kind parses to a dyadic martingale.
struct MartingaleInput {
  std::optional<Martingale> dyadic;
  std::optional<SavingsMartingale> savings;
};
MartingaleInput parse_martingale_input(const json& j);
Martingale parse_martingale(const json& j);  // rejects bare savings
json martingale_json(const Martingale& d);
json savings_json(const SavingsMartingale& s);

json machine_json(const MachineTable& m);
MachineTable parse_machine(const json& j);

json family_json(const StagedTestFamily& fam);
StagedTestFamily parse_family(const json& j);

json battery_json(const Battery& battery);
Battery parse_battery(const json& j);

json requests_json(const std::vector<Request>& reqs);
std::vector<Request> parse_requests(const json& j);

SequenceSource parse_sequence(const json& j);

json trace_json(const DiagonalTrace& trace);
DiagonalTrace parse_trace(const json& j);

json success_report_json(const SuccessReport& r);
std::string success_report_csv(const SuccessReport& r);
json family_report_json(const FamilyReport& r);
json control_witness_json(const ControlWitness& w);
json kc_result_json(const KCResult& kc);
json hit_report_json(const HitReport& r);
json trace_report_json(const TraceReport& r);

json load_json_file(const std::string& path);
std::string load_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cantor::io
