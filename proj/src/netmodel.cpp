#include "skm/netmodel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

int Reaction::alpha(int species) const {
    for (const auto& t : reactants)
        if (t.species == species) return t.stoich;
    return 0;
}

int Reaction::beta(int species) const {
    for (const auto& t : products)
        if (t.species == species) return t.stoich;
    return 0;
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_ids, std::vector<Reaction> reactions)
    : reactions_(std::move(reactions)) {
    const int n = static_cast<int>(species_ids.size());
    std::set<std::string> seen_ids;
    for (int k = 0; k < n; ++k) {
        auto& id = species_ids[static_cast<std::size_t>(k)];
        if (!seen_ids.insert(id).second) throw Error("duplicate-species-id", "species '" + id + "' declared twice");
        species_.push_back({std::move(id), k});
    }

    std::set<std::string> seen_names;
    for (const auto& r : reactions_) {
        if (!seen_names.insert(r.name).second)
            throw Error("duplicate-reaction", "reaction name '" + r.name + "' used twice");
        for (const auto* side : {&r.reactants, &r.products}) {
            std::set<int> in_side;
            for (const auto& t : *side) {
                if (t.species < 0 || t.species >= n)
                    throw Error("unknown-species", "reaction '" + r.name + "' names an unknown species index");
                if (t.stoich <= 0)
                    throw Error("bad-stoichiometry", "reaction '" + r.name + "' has a non-positive stoichiometry");
                if (!in_side.insert(t.species).second)
                    throw Error("duplicate-species", "reaction '" + r.name + "' lists species '" +
                                                         species_[static_cast<std::size_t>(t.species)].id +
                                                         "' twice on one side");
            }
        }
        if (!(r.rate >= 0.0) || !std::isfinite(r.rate))
            throw Error("bad-rate", "reaction '" + r.name + "' has a negative or non-finite rate constant");
        if (r.kinetics == Kinetics::table) {
            if (r.reactants.size() != 1)
                throw Error("bad-kinetics", "tabulated kinetics on '" + r.name + "' needs exactly one reactant");
            if (r.table.empty() || std::any_of(r.table.begin(), r.table.end(),
                                               [](double v) { return !(v >= 0.0) || !std::isfinite(v); }))
                throw Error("bad-kinetics", "table of '" + r.name + "' must be nonempty, finite and nonnegative");
        } else if (!r.table.empty()) {
            throw Error("bad-kinetics", "reaction '" + r.name + "' carries a table but uses mass action");
        }
    }

    s_.assign(static_cast<std::size_t>(n) * reactions_.size(), 0);
    for (std::size_t m = 0; m < reactions_.size(); ++m) {
        for (const auto& t : reactions_[m].reactants) s_[m * species_.size() + static_cast<std::size_t>(t.species)] -= t.stoich;
        for (const auto& t : reactions_[m].products) s_[m * species_.size() + static_cast<std::size_t>(t.species)] += t.stoich;
    }

    std::map<std::vector<int>, int> columns;
    for (int m = 0; m < reaction_count(); ++m) {
        std::vector<int> col(column(m).begin(), column(m).end());
        auto [it, inserted] = columns.emplace(col, m);
        if (!inserted)
            throw Error("duplicate-column", "reactions '" + reaction(it->second).name + "' and '" +
                                                reaction(m).name + "' have identical stoichiometric columns");
    }
}

std::optional<int> ReactionNetwork::find_species(std::string_view id) const {
    for (const auto& s : species_)
        if (s.id == id) return s.index;
    return std::nullopt;
}

std::optional<int> ReactionNetwork::find_reaction(std::string_view name) const {
    for (int m = 0; m < reaction_count(); ++m)
        if (reaction(m).name == name) return m;
    return std::nullopt;
}

int ReactionNetwork::species_index(std::string_view id) const {
    if (auto k = find_species(id)) return *k;
    throw Error("unknown-species", "unknown species '" + std::string(id) + "'");
}

int ReactionNetwork::reaction_index(std::string_view name) const {
    if (auto m = find_reaction(name)) return *m;
    throw Error("unknown-reaction", "unknown reaction '" + std::string(name) + "'");
}

SpeciesSet ReactionNetwork::species_set(const std::vector<std::string>& ids) const {
    SpeciesSet s;
    for (const auto& id : ids) s.insert(species_index(id));
    return s;
}

ReactionSet ReactionNetwork::reaction_set(const std::vector<std::string>& names) const {
    ReactionSet r;
    for (const auto& name : names) r.insert(reaction_index(name));
    return r;
}

SpeciesSet ReactionNetwork::reactants(int m) const {
    SpeciesSet s;
    for (const auto& t : reaction(m).reactants) s.insert(t.species);
    return s;
}

SpeciesSet ReactionNetwork::products(int m) const {
    SpeciesSet s;
    for (const auto& t : reaction(m).products) s.insert(t.species);
    return s;
}

SpeciesSet ReactionNetwork::changed_species(int m) const {
    SpeciesSet s;
    auto col = column(m);
    for (int k = 0; k < species_count(); ++k)
        if (col[static_cast<std::size_t>(k)] != 0) s.insert(k);
    return s;
}

std::vector<std::string> ReactionNetwork::species_names(const SpeciesSet& s) const {
    std::vector<std::string> out;
    for (int k : s) out.push_back(species_id(k));
    return out;
}

std::vector<std::string> ReactionNetwork::reaction_names(const ReactionSet& r) const {
    std::vector<std::string> out;
    for (int m : r) out.push_back(reaction(m).name);
    return out;
}

// ---- parser -----------------------------------------------------------------

namespace {

bool is_id_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_id_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return is_id_char(c) || c == '.' || c == '-'; }

class LineCursor {
public:
    LineCursor(std::string_view line, int line_no) : line_(line), line_no_(line_no) {}

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < line_.size() ? line_[pos_] : '\0';
    }
    bool accept(std::string_view token) {
        skip_ws();
        if (line_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view token, const char* what) {
        if (!accept(token)) fail("syntax", std::string("expected ") + what);
    }
    std::string identifier(const char* what) {
        skip_ws();
        if (pos_ >= line_.size() || !is_id_start(line_[pos_])) fail("syntax", std::string("expected ") + what);
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_id_char(line_[pos_])) ++pos_;
        return std::string(line_.substr(start, pos_ - start));
    }
    std::string reaction_name() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < line_.size() && is_name_char(line_[pos_])) ++pos_;
        if (start == pos_) fail("syntax", "expected reaction name");
        return std::string(line_.substr(start, pos_ - start));
    }
    bool at_digit() { return std::isdigit(static_cast<unsigned char>(peek())) != 0; }
    long integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        long value = 0;
        auto [ptr, ec] = std::from_chars(line_.data() + start, line_.data() + pos_, value);
        if (ec != std::errc() || start == pos_) fail_at(start, "syntax", "malformed integer");
        return value;
    }
    double number(const char* what) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) ||
                                       line_[pos_] == '.' || line_[pos_] == '-' || line_[pos_] == '+'))
            ++pos_;
        std::string token(line_.substr(start, pos_ - start));
        char* end = nullptr;
        double v = std::strtod(token.c_str(), &end);
        if (token.empty() || end != token.c_str() + token.size()) fail_at(start, "syntax", std::string("expected ") + what);
        return v;
    }
    int column() const { return static_cast<int>(pos_) + 1; }

    [[noreturn]] void fail(const std::string& code, const std::string& message) { fail_at(pos_, code, message); }
    [[noreturn]] void fail_at(std::size_t pos, const std::string& code, const std::string& message) {
        throw ParseError(code, message, line_no_, static_cast<int>(pos) + 1);
    }

private:
    std::string_view line_;
    int line_no_;
    std::size_t pos_ = 0;
};

struct RawTerm {
    std::string species;
    long stoich;
    int column;
};

struct RawReaction {
    Reaction reaction;
    std::vector<RawTerm> lhs, rhs;
    int line;
};

std::vector<RawTerm> parse_side(LineCursor& cur, bool lhs) {
    std::vector<RawTerm> terms;
    // `0` alone denotes the empty side; `0 X` is a zero stoichiometry.
    if (cur.at_digit()) {
        LineCursor probe = cur;
        long k = probe.integer();
        char next = probe.peek();
        if (k == 0 && (next == '\0' || next == ';' || next == '#' || (lhs && next == '-'))) {
            cur = probe;
            return terms;
        }
    }
    while (true) {
        int col = cur.column();
        long k = 1;
        if (cur.peek() == '-') cur.fail("bad-stoichiometry", "stoichiometries must be positive integers");
        if (cur.at_digit()) {
            k = cur.integer();
            if (k <= 0) cur.fail("bad-stoichiometry", "stoichiometries must be positive integers");
        }
        std::string id = cur.identifier("species id");
        terms.push_back({std::move(id), k, col});
        if (!cur.accept("+")) break;
    }
    return terms;
}

void parse_attributes(LineCursor& cur, Reaction& r) {
    bool seen_rate = false;
    while (cur.accept(";")) {
        if (cur.accept("c")) {
            if (seen_rate) cur.fail("syntax", "rate constant given twice");
            cur.expect("=", "'=' after c");
            int col = cur.column();
            r.rate = cur.number("rate constant");
            if (!(r.rate >= 0.0) || !std::isfinite(r.rate))
                cur.fail_at(static_cast<std::size_t>(col - 1), "bad-rate", "rate constant must be a nonnegative number");
            seen_rate = true;
        } else if (cur.accept("g")) {
            cur.expect("=", "'=' after g");
            cur.expect("[", "'[' opening the g table");
            r.kinetics = Kinetics::table;
            if (!cur.accept("]")) {
                do {
                    r.table.push_back(cur.number("table value"));
                } while (cur.accept(","));
                cur.expect("]", "']' closing the g table");
            }
        } else {
            cur.fail("syntax", "expected attribute c=<float> or g=[...]");
        }
    }
}

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
    std::vector<std::string> declared;
    bool has_declaration = false;
    std::vector<RawReaction> raw;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        LineCursor cur(line, line_no);
        if (cur.at_end()) {
            if (end == text.size()) break;
            continue;
        }

        LineCursor probe = cur;
        if (probe.accept("species") && probe.accept(":")) {
            if (!raw.empty()) cur.fail("syntax", "species declaration must precede reactions");
            has_declaration = true;
            cur = probe;
            while (!cur.at_end()) declared.push_back(cur.identifier("species id"));
            if (end == text.size()) break;
            continue;
        }

        RawReaction rr;
        rr.line = line_no;
        rr.reaction.name = cur.reaction_name();
        cur.expect(":", "':' after reaction name");
        rr.lhs = parse_side(cur, true);
        cur.expect("->", "'->'");
        rr.rhs = parse_side(cur, false);
        parse_attributes(cur, rr.reaction);
        if (!cur.at_end()) cur.fail("syntax", "unexpected trailing input");
        raw.push_back(std::move(rr));
        if (end == text.size()) break;
    }

    if (raw.empty() && !has_declaration) throw ParseError("empty", "no reactions found", line_no, 1);

    std::vector<std::string> ids = declared;
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!index.emplace(ids[k], static_cast<int>(k)).second)
            throw ParseError("duplicate-species-id", "species '" + ids[k] + "' declared twice", 1, 1);
    }

    std::vector<Reaction> reactions;
    std::set<std::string> names;
    for (auto& rr : raw) {
        if (!names.insert(rr.reaction.name).second)
            throw ParseError("duplicate-reaction", "reaction name '" + rr.reaction.name + "' used twice", rr.line, 1);
        auto resolve = [&](const std::vector<RawTerm>& side, std::vector<Term>& out) {
            for (const auto& t : side) {
                auto it = index.find(t.species);
                if (it == index.end()) {
                    if (has_declaration)
                        throw ParseError("undeclared-species", "species '" + t.species + "' is not declared",
                                         rr.line, t.column);
                    it = index.emplace(t.species, static_cast<int>(ids.size())).first;
                    ids.push_back(t.species);
                }
                for (const auto& prev : out)
                    if (prev.species == it->second)
                        throw ParseError("duplicate-species",
                                         "species '" + t.species + "' appears twice on one side", rr.line, t.column);
                out.push_back({it->second, static_cast<int>(t.stoich)});
            }
        };
        resolve(rr.lhs, rr.reaction.reactants);
        resolve(rr.rhs, rr.reaction.products);
        reactions.push_back(std::move(rr.reaction));
    }

    std::vector<std::pair<std::string, int>> lines;
    for (const auto& r : reactions) lines.emplace_back(r.name, 0);
    for (std::size_t i = 0; i < raw.size(); ++i) lines[i].second = raw[i].line;

    try {
        return ReactionNetwork(std::move(ids), std::move(reactions));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        // Attribute constructor failures (e.g. duplicate columns) to the later reaction's line.
        int line = 0;
        for (const auto& [name, at] : lines)
            if (std::string(e.what()).find("'" + name + "'") != std::string::npos) line = at;
        throw ParseError(e.code(), e.what(), line, 1);
    }
}

ReactionNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::string side_text(const ReactionNetwork& net, const std::vector<Term>& side) {
    if (side.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (i) out += " + ";
        if (side[i].stoich != 1) out += std::to_string(side[i].stoich) + " ";
        out += net.species_id(side[i].species);
    }
    return out;
}

Json side_json(const ReactionNetwork& net, const std::vector<Term>& side) {
    Json out = Json::array();
    for (const auto& t : side) out.push_back({{"species", net.species_id(t.species)}, {"stoich", t.stoich}});
    return out;
}

}  // namespace

std::string to_text(const ReactionNetwork& net) {
    std::string out = "species:";
    for (const auto& s : net.species()) out += " " + s.id;
    out += "\n";
    for (const auto& r : net.reactions()) {
        out += r.name + ": " + side_text(net, r.reactants) + " -> " + side_text(net, r.products) +
               " ; c=" + format_double(r.rate);
        if (r.kinetics == Kinetics::table) {
            out += " ; g=[";
            for (std::size_t i = 0; i < r.table.size(); ++i) out += (i ? ", " : "") + format_double(r.table[i]);
            out += "]";
        }
        out += "\n";
    }
    return out;
}

Json to_json(const ReactionNetwork& net) {
    Json species = Json::array();
    for (const auto& s : net.species()) species.push_back(s.id);
    Json reactions = Json::array();
    for (int m = 0; m < net.reaction_count(); ++m) {
        const auto& r = net.reaction(m);
        Json jr{{"name", r.name},
                {"reactants", side_json(net, r.reactants)},
                {"products", side_json(net, r.products)},
                {"rate", r.rate},
                {"kinetics", r.kinetics == Kinetics::table ? "table" : "mass_action"}};
        if (r.kinetics == Kinetics::table) jr["table"] = r.table;
        Json change = Json::object();
        for (int k = 0; k < net.species_count(); ++k)
            if (net.stoich(k, m) != 0) change[net.species_id(k)] = net.stoich(k, m);
        jr["change"] = change;
        reactions.push_back(std::move(jr));
    }
    return {{"species", species}, {"reactions", reactions}};
}

ReactionNetwork network_from_json(const Json& j) {
    try {
        std::vector<std::string> ids = j.at("species").get<std::vector<std::string>>();
        std::map<std::string, int> index;
        for (std::size_t k = 0; k < ids.size(); ++k) index.emplace(ids[k], static_cast<int>(k));
        std::vector<Reaction> reactions;
        for (const auto& jr : j.at("reactions")) {
            Reaction r;
            r.name = jr.at("name").get<std::string>();
            auto side = [&](const Json& js, std::vector<Term>& out) {
                for (const auto& t : js) {
                    auto id = t.at("species").get<std::string>();
                    auto it = index.find(id);
                    if (it == index.end()) throw Error("unknown-species", "unknown species '" + id + "'");
                    out.push_back({it->second, t.at("stoich").get<int>()});
                }
            };
            side(jr.at("reactants"), r.reactants);
            side(jr.at("products"), r.products);
            r.rate = jr.value("rate", 1.0);
            if (jr.value("kinetics", std::string("mass_action")) == "table") {
                r.kinetics = Kinetics::table;
                r.table = jr.at("table").get<std::vector<double>>();
            }
            reactions.push_back(std::move(r));
        }
        return ReactionNetwork(std::move(ids), std::move(reactions));
    } catch (const nlohmann::json::exception& e) {
        throw Error("bad-json", std::string("malformed network JSON: ") + e.what());
    }
}

// ---- reaction sets ----------------------------------------------------------

namespace {

void check_species_indices(const ReactionNetwork& net, const SpeciesSet& s) {
    for (int k : s)
        if (k < 0 || k >= net.species_count()) throw Error("unknown-species", "species index out of range");
}

std::vector<int> restricted_change(const ReactionNetwork& net, int m, const SpeciesSet& rows) {
    std::vector<int> v;
    v.reserve(rows.size());
    for (int k : rows) v.push_back(net.stoich(k, m));
    return v;
}

}  // namespace

ReactionSet changed_reactions(const ReactionNetwork& net, const SpeciesSet& a) {
    check_species_indices(net, a);
    ReactionSet out;
    for (int m = 0; m < net.reaction_count(); ++m) {
        for (int k : a) {
            if (net.stoich(k, m) != 0) {
                out.insert(m);
                break;
            }
        }
    }
    return out;
}

std::vector<ReactionClass> group_by_change(const ReactionNetwork& net, const ReactionSet& reactions,
                                           const SpeciesSet& rows) {
    std::map<std::vector<int>, ReactionSet> groups;
    for (int m : reactions) groups[restricted_change(net, m, rows)].insert(m);
    std::vector<ReactionClass> out;
    for (auto& [change, members] : groups) out.push_back({change, members});
    return out;
}

std::vector<ReactionClass> subprocess_partition(const ReactionNetwork& net, const SpeciesSet& a) {
    if (a.empty()) throw Error("empty-set", "subprocess partition needs a nonempty species set");
    return group_by_change(net, changed_reactions(net, a), a);
}

const char* to_string(DStarBlock b) {
    switch (b) {
        case DStarBlock::A: return "A";
        case DStarBlock::AB: return "AB";
        case DStarBlock::B: return "B";
        case DStarBlock::D: return "D";
    }
    return "?";
}

std::vector<ReactionClass> PartitionABD::star_classes() const {
    std::vector<ReactionClass> out;
    for (const auto& block : classes) out.insert(out.end(), block.begin(), block.end());
    return out;
}

PartitionABD dstar_partition(const ReactionNetwork& net, const SpeciesPartition& p, CellPolicy policy) {
    check_species_indices(net, p.a);
    check_species_indices(net, p.b);
    check_species_indices(net, p.d);
    if (p.a.intersects(p.b) || p.a.intersects(p.d) || p.b.intersects(p.d))
        throw Error("not-a-partition", "partition cells A, B, D overlap");
    if ((p.a | p.b | p.d) != net.all_species())
        throw Error("not-a-partition", "partition cells A, B, D do not cover every species");
    if (policy == CellPolicy::require_nonempty && (p.a.empty() || p.b.empty() || p.d.empty()))
        throw Error("empty-cell", "partition cells A, B and D must all be nonempty");

    PartitionABD out;
    out.cells = p;
    out.delta_a = changed_reactions(net, p.a);
    out.delta_b = changed_reactions(net, p.b);
    out.delta_d = changed_reactions(net, p.d);
    const auto& da = out.delta_a;
    const auto& db = out.delta_b;
    const auto& dd = out.delta_d;
    out.blocks[0] = (dd & da) - db;
    out.blocks[1] = dd & da & db;
    out.blocks[2] = (dd & db) - da;
    out.blocks[3] = dd - (da | db);
    for (std::size_t i = 0; i < 4; ++i) out.classes[i] = group_by_change(net, out.blocks[i], p.d);
    return out;
}

SpeciesPartition parse_partition(const ReactionNetwork& net, std::string_view spec) {
    std::vector<SpeciesSet> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t end = spec.find(';', start);
        std::string_view cell = spec.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        SpeciesSet s;
        std::size_t p = 0;
        while (p <= cell.size()) {
            std::size_t q = cell.find(',', p);
            if (q == std::string_view::npos) q = cell.size();
            std::string id(cell.substr(p, q - p));
            id.erase(0, id.find_first_not_of(" \t"));
            id.erase(id.find_last_not_of(" \t") + 1);
            if (!id.empty()) s.insert(net.species_index(id));
            p = q + 1;
        }
        cells.push_back(s);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (cells.size() != 3) throw Error("bad-partition-syntax", "partition must have the form A;B;D");
    return {cells[0], cells[1], cells[2]};
}

// ---- regularity checks -------------------------------------------------------

ValidationReport check_standard(const ReactionNetwork& net) {
    ValidationReport report;
    for (int m = 0; m < net.reaction_count(); ++m) {
        const auto& name = net.reaction(m).name;
        auto changed = net.changed_species(m);
        if (changed.empty())
            report.add("standard.i", Severity::error, "reaction '" + name + "' changes no species", {name});
        auto r = net.reactants(m);
        if (r.empty() && net.products(m).size() != 1)
            report.add("standard.iii", Severity::error,
                       "zeroth-order reaction '" + name + "' must have exactly one product", {name});
        auto r_star = r & changed;
        if (r.size() == 1 && r_star.size() != 1)
            report.add("standard.iv", Severity::error,
                       "reaction '" + name + "' has a single reactant that it does not change", {name});
        if (r.size() > 1 && (r - r_star).size() > 1)
            report.add("standard.iv", Severity::error,
                       "reaction '" + name + "' leaves more than one reactant unchanged", {name});
    }
    for (int k = 0; k < net.species_count(); ++k) {
        bool changed = false;
        for (int m = 0; m < net.reaction_count() && !changed; ++m) changed = net.stoich(k, m) != 0;
        if (!changed)
            report.add("standard.ii", Severity::error, "species '" + net.species_id(k) + "' is never changed",
                       {net.species_id(k)});
    }
    return report;
}

ValidationReport check_ident_consumption(const ReactionNetwork& net, const ReactionSet& gamma) {
    ValidationReport report;
    for (int m : gamma)
        if (m < 0 || m >= net.reaction_count()) throw Error("unknown-reaction", "reaction index out of range");

    std::map<std::vector<int>, int> negative_parts;
    for (int m : gamma) {
        const auto& name = net.reaction(m).name;
        for (int i : net.reactants(m))
            if (net.stoich(i, m) > 0)
                report.add("ident.i", Severity::error,
                           "reaction '" + name + "' increases its reactant '" + net.species_id(i) + "'",
                           {name, net.species_id(i)});
        for (int i : net.products(m))
            if (net.stoich(i, m) < 0)
                report.add("ident.i", Severity::error,
                           "reaction '" + name + "' decreases its product '" + net.species_id(i) + "'",
                           {name, net.species_id(i)});
        std::vector<int> negative;
        for (int v : net.column(m)) negative.push_back(std::min(v, 0));
        auto [it, inserted] = negative_parts.emplace(negative, m);
        if (!inserted) {
            const auto& other = net.reaction(it->second).name;
            report.add("ident.ii", Severity::error,
                       "reactions '" + other + "' and '" + name + "' consume reactants identically", {other, name});
        }
    }
    return report;
}

ValidationReport check_history_equality(const ReactionNetwork& net, const PartitionABD& p) {
    ValidationReport report;
    auto classes = group_by_change(net, p.delta_d, p.cells.d);
    for (const auto& cls : classes) {
        const auto& members = cls.reactions.items();
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                int m = members[i];
                int mt = members[j];
                if (p.delta_a.contains(m) != p.delta_a.contains(mt) || p.delta_b.contains(m) != p.delta_b.contains(mt)) {
                    const auto& a = net.reaction(m).name;
                    const auto& b = net.reaction(mt).name;
                    report.add("history-equality", Severity::error,
                               "reactions '" + a + "' and '" + b +
                                   "' change the separator identically but differ in which of A/B they change",
                               {a, b});
                }
            }
        }
    }
    return report;
}

bool refinement_check(const ReactionNetwork& net, const PartitionABD& p) {
    auto coarse = group_by_change(net, p.delta_d, p.cells.d);
    auto fine = p.star_classes();
    for (const auto& cls : coarse) {
        ReactionSet covered;
        for (const auto& f : fine) {
            if (f.reactions.is_subset_of(cls.reactions)) {
                covered |= f.reactions;
            } else if (f.reactions.intersects(cls.reactions)) {
                return false;
            }
        }
        if (covered != cls.reactions) return false;
    }
    return true;
}

ReactionNetwork normalize_catalysts(const ReactionNetwork& net) {
    auto report = check_standard(net);
    std::set<std::string> offending;
    for (const auto& f : report.findings)
        if (f.code == "standard.iv") offending.insert(f.subjects.front());
    if (offending.empty()) return net;

    std::vector<std::string> ids;
    for (const auto& s : net.species()) ids.push_back(s.id);
    std::vector<Reaction> reactions;
    for (const auto& r : net.reactions()) {
        if (!offending.count(r.name)) {
            reactions.push_back(r);
            continue;
        }
        std::string complex = r.name + "_cplx";
        while (std::find(ids.begin(), ids.end(), complex) != ids.end()) complex += "_";
        int c = static_cast<int>(ids.size());
        ids.push_back(complex);
        Reaction bind{r.name + "_bind", r.reactants, {{c, 1}}, r.rate, r.kinetics, r.table};
        Reaction release{r.name + "_release", {{c, 1}}, r.products, 1.0, Kinetics::mass_action, {}};
        reactions.push_back(std::move(bind));
        reactions.push_back(std::move(release));
    }
    return ReactionNetwork(std::move(ids), std::move(reactions));
}

Json to_json(const ReactionNetwork& net, const PartitionABD& p) {
    auto class_json = [&](const std::vector<ReactionClass>& classes) {
        Json arr = Json::array();
        for (const auto& c : classes) arr.push_back({{"change", c.change}, {"reactions", net.reaction_names(c.reactions)}});
        return arr;
    };
    Json blocks = Json::object();
    for (auto b : {DStarBlock::A, DStarBlock::AB, DStarBlock::B, DStarBlock::D}) {
        blocks[to_string(b)] = {{"reactions", net.reaction_names(p.block(b))}, {"classes", class_json(p.block_classes(b))}};
    }
    return {{"A", net.species_names(p.cells.a)},
            {"B", net.species_names(p.cells.b)},
            {"D", net.species_names(p.cells.d)},
            {"blocks", blocks}};
}

}  // namespace skm
