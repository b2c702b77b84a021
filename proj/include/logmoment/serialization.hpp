#pragma once

// JSON forms of reports, search results and distributions.
//
// Field order is fixed so equal inputs always serialize to identical bytes.
// Non-finite numbers are written as null; in slopes null means a wall.

#include <json.hpp>

#include "logmoment/distributions.hpp"
#include "logmoment/extremal.hpp"
#include "logmoment/verify.hpp"

namespace logmoment {

using Json = nlohmann::ordered_json;

Json to_json(const Distribution& d);
/// Accepts the output of to_json. A document without "family" is read as a
/// potential, so the files accepted by plc:file= also load here.
Distribution distribution_from_json(const Json& j);

Json to_json(const VerificationReport& r);
VerificationReport report_from_json(const Json& j);

/// records are included only on request; failures always are.
Json to_json(const ScanResult& s, bool include_records = false);
ScanResult scan_from_json(const Json& j);

Json to_json(const MomentValue& m);
Json to_json(const ShiftScanResult& s);
Json to_json(const TruncScanResult& s);
Json to_json(const ShiftRoots& r);
Json to_json(const CheckOutcome& outcome, bool include_records = false);

std::string_view method_name(MomentMethod m);

}  // namespace logmoment
