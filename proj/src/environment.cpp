#include "graphband/environment.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "graphband/errors.hpp"
#include "tokenize.hpp"

namespace graphband {

GroupedEnvironment::GroupedEnvironment(int K, std::vector<int> slot_groups,
                                       std::map<int, std::vector<double>> group_means)
    : K_(K), slot_groups_(std::move(slot_groups)), group_means_(std::move(group_means)) {
    if (K_ < 1) throw config_error("arm count must be at least 1");
    if (slot_groups_.empty()) throw config_error("environment needs at least one slot");
    for (const auto& [g, mu] : group_means_) {
        if (static_cast<int>(mu.size()) != K_)
            throw config_error("group " + std::to_string(g) + " has " +
                               std::to_string(mu.size()) + " means, expected " +
                               std::to_string(K_));
        for (double m : mu)
            if (!(m >= 0.0 && m <= 1.0))
                throw config_error("mean outside [0,1] in group " + std::to_string(g));
    }
    for (int g : slot_groups_)
        if (group_means_.find(g) == group_means_.end())
            throw config_error("slot group " + std::to_string(g) + " has no mean vector");
}

int GroupedEnvironment::group_of(int slot) const {
    if (slot < 1 || slot > slot_count())
        throw std::invalid_argument("slot out of range: " + std::to_string(slot));
    return slot_groups_[static_cast<size_t>(slot) - 1];
}

const std::vector<double>& GroupedEnvironment::means_of(int group) const {
    auto it = group_means_.find(group);
    if (it == group_means_.end())
        throw std::invalid_argument("unknown group: " + std::to_string(group));
    return it->second;
}

int GroupedEnvironment::pull(int slot, int arm, Rng& rng) const {
    const auto& mu = means_of(group_of(slot));
    if (arm < 0 || arm >= K_)
        throw std::invalid_argument("arm out of range: " + std::to_string(arm));
    return rng.bernoulli(mu[static_cast<size_t>(arm)]) ? 1 : 0;
}

double GroupedEnvironment::instant_pseudo_regret(int slot, int arm) const {
    const auto& mu = means_of(group_of(slot));
    if (arm < 0 || arm >= K_)
        throw std::invalid_argument("arm out of range: " + std::to_string(arm));
    return *std::max_element(mu.begin(), mu.end()) - mu[static_cast<size_t>(arm)];
}

int GroupedEnvironment::best_arm(int group) const {
    const auto& mu = means_of(group);
    return static_cast<int>(std::max_element(mu.begin(), mu.end()) - mu.begin());
}

double GroupedEnvironment::delta_min() const {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& [g, mu] : group_means_) {
        double top = *std::max_element(mu.begin(), mu.end());
        if (std::count(mu.begin(), mu.end(), top) > 1)
            throw config_error("delta_min undefined: tied best arm in group " +
                               std::to_string(g));
        for (double m : mu)
            if (m < top) smallest = std::min(smallest, top - m);
    }
    return smallest;
}

GeneratorSpec parse_generator_spec(const std::string& text) {
    using Kind = GeneratorSpec::Kind;
    GeneratorSpec spec;
    if (text == "iid") {
        spec.kind = Kind::IidUniform;
        return spec;
    }
    if (text == "rr") {
        spec.kind = Kind::RoundRobin;
        return spec;
    }
    if (text.rfind("block:", 0) == 0) {
        spec.kind = Kind::Block;
        spec.dwell = static_cast<int>(detail::to_ll(text.substr(6), "block dwell"));
        return spec;
    }
    if (text.rfind("cutadv:", 0) == 0) {
        std::string rest = text.substr(7);
        auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw config_error("cutadv needs <edge>,<period>, got '" + text + "'");
        spec.kind = Kind::CutAdversary;
        spec.cut_low = static_cast<int>(detail::to_ll(rest.substr(0, comma), "cut edge"));
        spec.period =
            static_cast<int>(detail::to_ll(rest.substr(comma + 1), "alternation period"));
        return spec;
    }
    throw config_error("unknown generator '" + text +
                       "' (want iid, rr, block:<d>, cutadv:<u>,<q>)");
}

ContextGenerator::ContextGenerator(GeneratorSpec spec, int n) : spec_(spec), n_(n) {
    if (n_ < 1) throw config_error("generator needs at least one slot");
    switch (spec_.kind) {
        case GeneratorSpec::Kind::Block:
            if (spec_.dwell < 1) throw config_error("block dwell must be at least 1");
            break;
        case GeneratorSpec::Kind::CutAdversary:
            if (spec_.period < 1)
                throw config_error("alternation period must be at least 1");
            if (spec_.cut_low < 1 || spec_.cut_low + 1 > n_)
                throw config_error("cut edge (" + std::to_string(spec_.cut_low) + "," +
                                   std::to_string(spec_.cut_low + 1) +
                                   ") outside the slot range");
            break;
        default:
            break;
    }
}

int ContextGenerator::next(Rng& rng) {
    switch (spec_.kind) {
        case GeneratorSpec::Kind::IidUniform:
            ++t_;
            return rng.next_index(n_);
        case GeneratorSpec::Kind::RoundRobin:
            return static_cast<int>(t_++ % n_) + 1;
        case GeneratorSpec::Kind::Block:
            return static_cast<int>((t_++ / spec_.dwell) % n_) + 1;
        case GeneratorSpec::Kind::CutAdversary:
            return spec_.cut_low + static_cast<int>((t_++ / spec_.period) % 2);
    }
    throw invariant_error("unreachable generator kind");
}

GroupedEnvironment read_environment(std::istream& in) {
    auto toks = detail::tokenize(in);
    size_t i = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (i >= toks.size())
            throw config_error(std::string("environment file truncated, expected ") + what);
        return toks[i++];
    };
    if (need("'K'") != "K") throw config_error("environment file must start with 'K'");
    int K = static_cast<int>(detail::to_ll(need("arm count"), "arm count"));
    if (need("'groups'") != "groups")
        throw config_error("expected 'groups' after the arm count");
    int G = static_cast<int>(detail::to_ll(need("group count"), "group count"));
    if (K < 1 || G < 1) throw config_error("bad environment header");

    std::map<int, std::vector<double>> means;
    for (int g = 1; g <= G; ++g) {
        std::vector<double> mu(static_cast<size_t>(K));
        for (int a = 0; a < K; ++a) mu[a] = detail::to_double(need("mean"), "mean");
        means.emplace(g, std::move(mu));
    }

    std::vector<std::pair<int, int>> pairs;
    while (i < toks.size()) {
        int slot = static_cast<int>(detail::to_ll(need("slot"), "slot"));
        int g = static_cast<int>(detail::to_ll(need("group id"), "group id"));
        pairs.emplace_back(slot, g);
    }
    int n = static_cast<int>(pairs.size());
    if (n < 1) throw config_error("environment file lists no slots");
    std::vector<int> slot_groups(static_cast<size_t>(n), -1);
    for (auto [slot, g] : pairs) {
        if (slot < 1 || slot > n)
            throw config_error("slot " + std::to_string(slot) + " outside 1.." +
                               std::to_string(n));
        if (g < 1 || g > G)
            throw config_error("group id " + std::to_string(g) + " outside 1.." +
                               std::to_string(G));
        if (slot_groups[static_cast<size_t>(slot) - 1] != -1)
            throw config_error("slot " + std::to_string(slot) + " listed twice");
        slot_groups[static_cast<size_t>(slot) - 1] = g;
    }
    return GroupedEnvironment(K, std::move(slot_groups), std::move(means));
}

GroupedEnvironment read_environment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open environment file: " + path);
    return read_environment(in);
}

void write_environment(std::ostream& out, const GroupedEnvironment& env) {
    std::map<int, int> renumber;
    for (const auto& [g, mu] : env.group_means()) {
        int next = static_cast<int>(renumber.size()) + 1;
        renumber.emplace(g, next);
    }
    out << "K " << env.arm_count() << '\n';
    out << "groups " << renumber.size() << '\n';
    out << std::setprecision(17);
    for (const auto& [g, mu] : env.group_means()) {
        for (size_t a = 0; a < mu.size(); ++a) {
            if (a) out << ' ';
            out << mu[a];
        }
        out << '\n';
    }
    for (int slot = 1; slot <= env.slot_count(); ++slot)
        out << slot << ' ' << renumber.at(env.group_of(slot)) << '\n';
}

void write_environment_file(const std::string& path, const GroupedEnvironment& env) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    write_environment(out, env);
}

}  // namespace graphband
