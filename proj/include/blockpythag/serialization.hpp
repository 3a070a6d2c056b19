#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "blockpythag/functional.hpp"
#include "blockpythag/inequalities.hpp"
#include "blockpythag/partition.hpp"
#include "blockpythag/pythagoras.hpp"
#include "blockpythag/witness_search.hpp"

namespace blockpythag {

// Key order in emitted files is fixed so byte-stability checks can diff
// outputs directly.
using json = nlohmann::ordered_json;

// Malformed or out-of-contract input files. Carries a message suitable for
// the diagnostic stream.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {"rows": r, "cols": c, "re": [[..]], "im": [[..]]}. On input "im" may be
// omitted for a real matrix; on output it is always present. All values
// must be finite.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// {"hostRows": r, "hostCols": c, "blocks": [{"name", "rows", "cols"}, ..]}.
// Loading validates the tiling and throws SchemaError on failure.
json partition_to_json(const Partition& p);
Partition partition_from_json(const json& j);

json certificate_to_json(const PythagorasCertificate& c);
PythagorasCertificate certificate_from_json(const json& j);

json report_to_json(const InequalityReport& r);

json functional_to_json(const FunctionalCertificate& c);

json hyperplane_to_json(const ComplexMatrix& compressed, const HyperplaneSpec& spec);

json search_result_to_json(const SearchResult& r);
SearchResult search_result_from_json(const json& j);

json scan_report_to_json(const ScanReport& r);

// Experiment manifest: partition shape, optional fixed host (otherwise one
// unit-disk host is drawn per seed), the seed list, and budget overrides.
struct SearchManifest {
    Partition partition;
    std::optional<ComplexMatrix> host;
    std::vector<std::uint64_t> seeds;
    SearchConfig budget;        // the per-run seed comes from `seeds`
    std::string mode = "search";  // "search" or "scan"
    std::size_t trials = 100;     // scan mode only
};
SearchManifest manifest_from_json(const json& j);
json manifest_to_json(const SearchManifest& m);

// File helpers; both throw SchemaError on I/O or parse problems.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace blockpythag
