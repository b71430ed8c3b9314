#pragma once
// Turns individual-level records into the smallest group population that the
// given rules cannot tell apart from the full individual roster: project each
// record onto the attributes the rules actually read or write, then merge
// equal projections and sum their weights.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pram/model.hpp"
#include "pram/rule.hpp"

namespace pram {

struct IndividualRecord {
    std::map<std::string, AttrValue> features;
    std::map<std::string, std::string> relations;  // name -> site id
    double weight = 1.0;
};

// Names mentioned anywhere a rule can observe or change state: condition
// atoms, probability expressions (feature refs, proportion relations and
// their predicate names), and actions (set targets, moved relations, '@'
// references).
std::set<std::string> relevant_attributes(const std::vector<Rule>& rules);

// Groups `records` by their projection onto relevant_attributes(rules) plus
// `extra_keep` (probe inputs, typically). A record that lacks a relevant
// attribute is an error naming the attribute and the record's 1-based index.
// Site objects are created for every distinct relation target.
Population compile(const std::vector<IndividualRecord>& records, const std::vector<Rule>& rules,
                   const std::set<std::string>& extra_keep = {});

// Delimiter-separated records with a header row. Columns are feature names,
// except `rel:<name>` columns (relations, values are site ids) and an
// optional `weight` column. Delimiter is ',' unless the header contains a
// tab. Integer-looking values become integers, everything else must be an
// identifier token. Empty cells mean "attribute absent".
std::vector<IndividualRecord> read_records(std::istream& in);
std::vector<IndividualRecord> read_records_file(const std::string& path);

}  // namespace pram
