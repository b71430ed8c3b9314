#include "pram/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "pram/error.hpp"

namespace pram {

namespace {

void collect_expression_names(const Expression& e, std::set<std::string>& out) {
    switch (e.kind()) {
        case Expression::Kind::constant:
            return;
        case Expression::Kind::feature_ref:
            out.insert(e.name());
            return;
        case Expression::Kind::proportion:
            out.insert(e.name());  // the relation being aggregated over
            for (const auto& [name, value] : e.predicate().tests()) out.insert(name);
            return;
        case Expression::Kind::neg:
            collect_expression_names(e.operand(), out);
            return;
        default:
            collect_expression_names(e.lhs(), out);
            collect_expression_names(e.rhs(), out);
            return;
    }
}

}  // namespace

std::set<std::string> relevant_attributes(const std::vector<Rule>& rules) {
    std::set<std::string> out;
    for (const Rule& rule : rules) {
        for (const Clause& clause : rule.clauses) {
            for (const ConditionAtom& a : clause.condition.atoms) out.insert(a.name);
            for (const ActionBundle& bundle : clause.bundles) {
                collect_expression_names(bundle.probability, out);
                for (const Action& action : bundle.actions) {
                    out.insert(action.attr);
                    if (action.kind == Action::Kind::move_relation &&
                        action.target == Action::MoveTarget::relation_ref) {
                        out.insert(action.target_name);
                    }
                }
            }
        }
    }
    return out;
}

Population compile(const std::vector<IndividualRecord>& records, const std::vector<Rule>& rules,
                   const std::set<std::string>& extra_keep) {
    std::set<std::string> keep = relevant_attributes(rules);
    keep.insert(extra_keep.begin(), extra_keep.end());

    Population population;
    std::size_t index = 0;
    for (const IndividualRecord& record : records) {
        ++index;
        if (record.weight < 0.0) {
            throw Error::validation("record " + std::to_string(index) +
                                    " has a negative weight");
        }
        Signature sig;
        for (const std::string& name : keep) {
            auto f = record.features.find(name);
            if (f != record.features.end()) {
                sig.set_feature(name, f->second);
                continue;
            }
            auto r = record.relations.find(name);
            if (r != record.relations.end()) {
                sig.set_relation(name, r->second);
                continue;
            }
            throw Error::validation("record " + std::to_string(index) +
                                    " is missing attribute '" + name +
                                    "' required by the rules");
        }
        Group g(sig, record.weight);
        population.upsert(std::move(g));
    }

    // one site per distinct relation target; name defaults to the id
    std::set<std::string> site_ids;
    for (const auto& [key, group] : population.groups()) {
        for (const auto& [rel, site] : group.signature().relations()) site_ids.insert(site);
    }
    for (const std::string& id : site_ids) population.add_site(SiteRef{id, id});

    // stable display names by canonical order
    int ordinal = 1;
    for (const auto& [key, group] : population.groups()) {
        population.find(key)->set_display_name("c" + std::to_string(ordinal++));
    }
    return population;
}

namespace {

bool looks_like_integer(const std::string& text) {
    if (text.empty()) return false;
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (start == text.size()) return false;
    return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(start), text.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<IndividualRecord> read_records(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw Error::validation("record input is empty (no header row)");
    }
    char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';

    struct Column {
        enum class Kind { feature, relation, weight } kind;
        std::string name;
    };
    std::vector<Column> columns;
    std::set<std::string> seen_names;
    for (const std::string& raw : split_row(header_line, delim)) {
        std::string name = trimmed(raw);
        if (name == "weight") {
            columns.push_back({Column::Kind::weight, name});
            continue;
        }
        Column::Kind kind = Column::Kind::feature;
        if (name.rfind("rel:", 0) == 0) {
            kind = Column::Kind::relation;
            name = trimmed(name.substr(4));
        }
        if (!is_identifier(name)) {
            throw Error::validation("header column '" + raw + "' is not a valid attribute name");
        }
        if (!seen_names.insert(name).second) {
            throw Error::validation("duplicate column '" + name + "' in header");
        }
        columns.push_back({kind, name});
    }

    std::vector<IndividualRecord> records;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trimmed(line).empty()) continue;
        std::vector<std::string> cells = split_row(line, delim);
        if (cells.size() != columns.size()) {
            throw Error::validation("line " + std::to_string(line_number) + " has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(columns.size()));
        }
        IndividualRecord record;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::string value = trimmed(cells[i]);
            if (value.empty()) continue;
            const Column& column = columns[i];
            switch (column.kind) {
                case Column::Kind::weight:
                    try {
                        record.weight = std::stod(value);
                    } catch (const std::exception&) {
                        throw Error::validation("line " + std::to_string(line_number) +
                                                ": weight '" + value + "' is not a number");
                    }
                    break;
                case Column::Kind::relation:
                    if (!is_identifier(value)) {
                        throw Error::validation("line " + std::to_string(line_number) +
                                                ": site id '" + value +
                                                "' is not a valid identifier");
                    }
                    record.relations[column.name] = value;
                    break;
                case Column::Kind::feature:
                    if (looks_like_integer(value)) {
                        record.features.emplace(column.name,
                                                AttrValue::integer(std::stoll(value)));
                    } else if (is_identifier(value)) {
                        record.features.emplace(column.name, AttrValue::token(value));
                    } else {
                        throw Error::validation("line " + std::to_string(line_number) +
                                                ": value '" + value + "' for '" + column.name +
                                                "' is neither an integer nor an identifier");
                    }
                    break;
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<IndividualRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error::validation("cannot open records file: " + path);
    return read_records(in);
}

}  // namespace pram
