#include "skm/modcheck.hpp"

#include <algorithm>
#include <sstream>

#include "skm/error.hpp"

namespace skm {

namespace {

Json names_json(const std::vector<std::string>& names, const SpeciesSet& s) {
    Json arr = Json::array();
    for (int v : s) arr.push_back(names.at(static_cast<std::size_t>(v)));
    return arr;
}

std::string joined(const std::vector<std::string>& names, const SpeciesSet& s) {
    std::string out;
    for (int v : s) out += (out.empty() ? "" : ",") + names.at(static_cast<std::size_t>(v));
    return out;
}

void recompute_separators(Modularization& mod) {
    for (auto& m : mod.modules) {
        m.separator = separator_by_intersection(mod, m.id);
        m.residual = m.members - m.separator;
    }
}

}  // namespace

const Module& Modularization::module(int id) const {
    for (const auto& m : modules)
        if (m.id == id) return m;
    throw Error("unknown-module", "no module with id " + std::to_string(id));
}

std::string module_label(const Modularization& mod, const Module& m) {
    std::string label = joined(mod.names, m.residual);
    if (!m.separator.empty()) label += (label.empty() ? "| " : " | ") + joined(mod.names, m.separator);
    return label;
}

Modularization derive_modularization(const JunctionTree& tree, std::string provenance) {
    Modularization mod;
    mod.names = tree.names;
    mod.provenance = std::move(provenance);
    for (const auto& c : tree.clusters) {
        Module m;
        m.id = c.id;
        m.members = c.members;
        m.separator = c.separator;
        for (int child : c.children) m.separator |= tree.cluster(child).separator;
        m.residual = m.members - m.separator;
        mod.modules.push_back(std::move(m));
    }
    return mod;
}

SpeciesSet separator_by_intersection(const Modularization& mod, int id) {
    const auto& target = mod.module(id);
    SpeciesSet others;
    for (const auto& m : mod.modules)
        if (m.id != id) others |= m.members;
    return target.members & others;
}

Modularization copy_species(const Modularization& mod, const std::vector<CopyMove>& moves) {
    if (moves.empty()) return mod;
    Modularization out = mod;
    for (const auto& move : moves) {
        if (move.species < 0 || static_cast<std::size_t>(move.species) >= out.names.size())
            throw Error("unknown-species", "species index out of range");
        const auto& from = out.module(move.from);
        const auto& to = out.module(move.to);
        const auto& name = out.names[static_cast<std::size_t>(move.species)];
        if (move.from == move.to)
            throw Error("bad-copy", "cannot copy '" + name + "' from a module to itself");
        if (!from.members.contains(move.species))
            throw Error("bad-copy", "'" + name + "' is not in module " + std::to_string(move.from));
        if (to.members.contains(move.species))
            throw Error("bad-copy", "'" + name + "' is already in module " + std::to_string(move.to));
        std::find_if(out.modules.begin(), out.modules.end(), [&](const Module& m) { return m.id == move.to; })
            ->members.insert(move.species);
    }
    recompute_separators(out);
    if (out.provenance.find("+copy") == std::string::npos) out.provenance += "+copy";
    return out;
}

PartitionCheck check_partition(const ReactionNetwork& net, const UndirectedGraph& graph, const SpeciesPartition& p,
                               bool condition_required) {
    PartitionCheck out;
    out.cells = p;
    auto abd = dstar_partition(net, p, CellPolicy::allow_empty);
    out.witness = separation_witness(graph, p.a, p.b, p.d);
    out.separation_ok = !out.witness.has_value();
    out.gamma = abd.delta_a & abd.delta_b;
    out.condition_required = condition_required;
    out.condition = check_ident_consumption(net, out.gamma);
    out.condition_ok = out.condition.passed();
    out.history = check_history_equality(net, abd);
    out.history_equal = out.history.passed();
    return out;
}

ModuleReport validate_modularization(const ReactionNetwork& net, const DirectedGraph& kig,
                                     const Modularization& mod) {
    SpeciesSet covered;
    for (const auto& m : mod.modules) covered |= m.members;
    if (covered != net.all_species()) {
        auto missing = net.all_species() - covered;
        throw Error("coverage", "modules do not cover species: " + joined(mod.names, missing));
    }

    const auto g = undirected(kig);
    ModuleReport report;
    report.certified = true;
    for (const auto& m : mod.modules) {
        ModuleCheck mc;
        mc.id = m.id;
        mc.label = module_label(mod, m);
        mc.check = check_partition(net, g, {m.residual, net.all_species() - m.members, m.separator});
        if (!m.residual.empty()) {
            mc.residual_closure = closure(kig, m.residual);
            mc.locally_independent = mc.residual_closure.is_subset_of(m.members);
        } else {
            mc.locally_independent = true;
        }
        report.certified = report.certified && mc.check.certified();
        report.modules.push_back(std::move(mc));
    }
    return report;
}

Json to_json(const Modularization& mod) {
    Json modules = Json::array();
    for (const auto& m : mod.modules)
        modules.push_back({{"id", m.id},
                           {"label", module_label(mod, m)},
                           {"members", names_json(mod.names, m.members)},
                           {"separator", names_json(mod.names, m.separator)},
                           {"residual", names_json(mod.names, m.residual)}});
    return {{"provenance", mod.provenance}, {"modules", modules}};
}

Json to_json(const ReactionNetwork& net, const PartitionCheck& c) {
    std::vector<std::string> names;
    for (const auto& s : net.species()) names.push_back(s.id);
    Json witness = nullptr;
    if (c.witness) {
        witness = Json::array();
        for (int v : *c.witness) witness.push_back(names.at(static_cast<std::size_t>(v)));
    }
    return {{"a", names_json(names, c.cells.a)},
            {"b", names_json(names, c.cells.b)},
            {"d", names_json(names, c.cells.d)},
            {"separation_ok", c.separation_ok},
            {"witness", witness},
            {"gamma", net.reaction_names(c.gamma)},
            {"condition_required", c.condition_required},
            {"condition_ok", c.condition_ok},
            {"condition", to_json(c.condition)},
            {"history_equal", c.history_equal},
            {"history", to_json(c.history)},
            {"certified", c.certified()}};
}

Json to_json(const ReactionNetwork& net, const ModuleReport& report) {
    std::vector<std::string> names;
    for (const auto& s : net.species()) names.push_back(s.id);
    Json modules = Json::array();
    for (const auto& m : report.modules) {
        Json entry = {{"id", m.id}, {"label", m.label}, {"residual", names_json(names, m.check.cells.a)}};
        entry["separator"] = names_json(names, m.check.cells.d);
        entry["check"] = to_json(net, m.check);
        entry["local_independence"] = {{"closure", names_json(names, m.residual_closure)},
                                       {"within_module", m.locally_independent}};
        modules.push_back(std::move(entry));
    }
    return {{"verdict", report.verdict()}, {"certified", report.certified}, {"modules", modules}};
}

std::string to_markdown(const ReactionNetwork& net, const ModuleReport& report) {
    std::vector<std::string> names;
    for (const auto& s : net.species()) names.push_back(s.id);
    auto mark = [](bool ok) { return ok ? "yes" : "**no**"; };
    std::ostringstream out;
    out << "## Modularization: " << report.verdict() << "\n\n";
    out << "| module | residual | separator | separated | boundary reactions | consumption identified | "
           "history equal | local independence |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& m : report.modules) {
        const auto& c = m.check;
        std::string gamma;
        for (const auto& r : net.reaction_names(c.gamma)) gamma += (gamma.empty() ? "" : ", ") + r;
        out << "| " << m.id << " | " << joined(names, c.cells.a) << " | " << joined(names, c.cells.d) << " | "
            << mark(c.separation_ok) << " | " << (gamma.empty() ? "-" : gamma) << " | " << mark(c.condition_ok)
            << " | " << (c.history_equal ? "yes" : "no") << " | " << mark(m.locally_independent) << " |\n";
    }
    bool any_detail = false;
    for (const auto& m : report.modules) {
        const auto& c = m.check;
        if (c.separation_ok && c.condition_ok && c.history_equal) continue;
        if (!any_detail) out << "\n### Details\n\n";
        any_detail = true;
        if (c.witness) {
            std::string path;
            for (int v : *c.witness) path += (path.empty() ? "" : " - ") + names.at(static_cast<std::size_t>(v));
            out << "- module " << m.id << ": path " << path << " avoids the separator\n";
        }
        for (const auto& f : c.condition.findings) out << "- module " << m.id << ": " << f.message << "\n";
        for (const auto& f : c.history.findings)
            out << "- module " << m.id << " (informational): " << f.message << "\n";
    }
    return out.str();
}

}  // namespace skm
