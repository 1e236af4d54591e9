// Copyright 2026 The gptkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line front end. Exit codes: 0 success or pass, 1 usage or input
// error, 2 audit violated.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gptkit/gptkit.hpp"

namespace {

using namespace gptkit;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolated = 2;

struct ToleranceFlag {
    const char* name;
    double Tolerances::*field;
    const char* help;
};

const ToleranceFlag kToleranceFlags[] = {
    {"vector", &Tolerances::vector, "vector arithmetic comparisons"},
    {"matrix", &Tolerances::matrix, "comparisons after decompositions or inversions"},
    {"membership", &Tolerances::membership, "distance from the state set accepted as a state"},
    {"image", &Tolerances::image, "distance accepted by the probability-to-density inverse"},
    {"hermitian", &Tolerances::hermitian, "hermiticity defect"},
    {"psd", &Tolerances::psd, "negative eigenvalue allowance"},
    {"trace", &Tolerances::trace, "unit-trace defect"},
    {"projector", &Tolerances::projector, "idempotence defect of projectors"},
    {"rank", &Tolerances::rank_relative, "relative singular-value cut-off for ranks"},
    {"support", &Tolerances::support, "eigenvalues or entries counted as zero"},
    {"distinguish", &Tolerances::distinguish, "perfect discrimination gate"},
    {"purity", &Tolerances::purity, "purity defect along reversible paths"},
};

struct Config {
    std::string kind;
    int dim = 0;
    std::string model_file;
    std::vector<int> restrict_to;
    std::string format = "table";
    Tolerances tol;
    std::uint64_t seed = 1;
    bool expect_violation = false;

    // audit
    std::string axiom;
    int subspace_dim = 0;
    int dim_b = 2;
    std::size_t samples = 101;
    std::size_t pairs = kContinuityPairs;
    std::size_t subspace_samples = kSubspaceSamples;

    // distinguish
    std::string states_file;
    bool lp = false;
    bool subset = false;

    // simulate
    std::optional<double> q;
    std::uint64_t n = 0;
    std::uint64_t stream = 0;
    std::string state_file;
    std::string effect_file;
    std::size_t fiducial = 0;
    bool all_fiducials = false;

    // tomo
    std::string counts_file;
    std::string truth_file;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ifstream open_input(const std::string& path, const std::string& flag) {
    std::ifstream in(path);
    if (!in) throw Error(flag + ": cannot open '" + path + "'");
    return in;
}

ModelDescriptor resolve_model(const Config& c) {
    ModelDescriptor m = [&] {
        if (!c.model_file.empty()) return io::read_model_file(c.model_file);
        if (c.kind.empty()) throw Error("--model: required (or give --model-file)");
        if (c.dim == 0) throw Error("--dim: required with --model");
        try {
            return c.kind == "classical" ? classical_model(c.dim) : quantum_model(c.dim);
        } catch (const Error& e) {
            throw Error(std::string("--dim: ") + e.what());
        }
    }();
    if (c.restrict_to.empty()) return m;
    try {
        return restrict_to_subspace(m, {m.hilbert_dim(), c.restrict_to}, c.tol);
    } catch (const Error& e) {
        throw Error(std::string("--restrict: ") + e.what());
    }
}

StateVector read_state_for(const ModelDescriptor& m, const std::string& path, const std::string& flag,
                           const Tolerances& tol) {
    auto in = open_input(path, flag);
    const StateVector s = io::read_state(in);
    if (s.model_id() != m.id()) throw Error(flag + ": state is for model " + s.model_id() + ", expected " + m.id());
    if (!m.contains(s, tol)) throw Error(flag + ": vector is not a state of " + m.id());
    return s;
}

int info(const Config& c) {
    const auto m = resolve_model(c);
    const auto labels = m.fiducial_labels();
    if (c.format == "csv") {
        std::cout << "model,kind,N,K,fiducial,label\n";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            std::cout << csv_field(m.id()) << ',' << to_string(m.kind()) << ',' << m.n() << ',' << m.k() << ','
                      << i + 1 << ',' << csv_field(labels[i]) << '\n';
        }
        return kExitOk;
    }
    std::cout << "model=" << m.id() << " kind=" << to_string(m.kind()) << " N=" << m.n() << " K=" << m.k() << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) std::cout << "fiducial " << i + 1 << ' ' << labels[i] << '\n';
    return kExitOk;
}

std::vector<AuditReport> run_audits(const Config& c) {
    const auto m = resolve_model(c);
    const bool all = c.axiom == "all";
    std::vector<AuditReport> out;
    if (all || c.axiom == "simplicity") {
        if (m.kind() == ModelKind::classical || m.kind() == ModelKind::quantum) {
            out.push_back(audit_simplicity(m.kind(), m.n(), c.tol));
        } else {
            out.push_back(audit_simplicity(std::span<const ModelDescriptor>(&m, 1), c.tol));
        }
    }
    if (all || c.axiom == "subspaces") {
        if (m.kind() != ModelKind::quantum) {
            out.emplace_back(Axiom::subspaces, Verdict::not_applicable, std::vector<std::pair<std::string, double>>{},
                             std::vector<std::string>{}, "subspace audit is defined for quantum models");
        } else {
            const int sub = c.subspace_dim ? c.subspace_dim : std::max(1, m.n() - 1);
            if (sub > m.n()) throw Error("--subspace-dim: must not exceed --dim");
            out.push_back(audit_subspaces(m.n(), sub, c.subspace_samples, c.seed, c.tol));
        }
    }
    if (all || c.axiom == "composites") {
        if (m.kind() != ModelKind::classical && m.kind() != ModelKind::quantum) {
            throw Error("--model: composites audit needs a classical or quantum model");
        }
        ModelDescriptor b = [&] {
            try {
                return m.kind() == ModelKind::classical ? classical_model(c.dim_b) : quantum_model(c.dim_b);
            } catch (const Error& e) {
                throw Error(std::string("--dim-b: ") + e.what());
            }
        }();
        if (m.k() * b.k() > kMaxDegreesOfFreedom) throw Error("--dim-b: composite exceeds K=256");
        out.push_back(audit_composites(m, b, c.seed, c.tol));
    }
    if (all || c.axiom == "continuity") out.push_back(audit_continuity(m, c.samples, c.pairs, c.seed, c.tol));
    return out;
}

int audit(const Config& c) {
    const auto reports = run_audits(c);
    if (c.format == "csv") {
        std::cout << "axiom,verdict,metric,value\n";
        for (const auto& r : reports) {
            const std::string head = std::string(to_string(r.axiom())) + ',' + to_string(r.verdict()) + ',';
            if (r.metrics().empty()) std::cout << head << ",\n";
            for (const auto& [k, v] : r.metrics()) std::cout << head << csv_field(k) << ',' << io::format_double(v) << '\n';
        }
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i) std::cout << '\n';
            std::cout << write_report(reports[i]);
        }
    }
    bool violated = false;
    for (const auto& r : reports) violated = violated || r.verdict() == Verdict::violated;
    if (c.expect_violation) return violated ? kExitOk : kExitViolated;
    return violated ? kExitViolated : kExitOk;
}

int distinguish(const Config& c) {
    const auto m = resolve_model(c);
    auto in = open_input(c.states_file, "--states");
    const auto states = io::read_states(in);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!m.contains(states[i], c.tol)) {
            throw Error("--states: block " + std::to_string(i + 1) + " is not a state of " + m.id());
        }
    }
    std::cout << io::write_certificate(perfectly_distinguishable(m, states, c.tol), m, states.size());
    if (c.subset) {
        const auto r = max_distinguishable_subset(m, states, c.tol);
        std::string idx;
        for (std::size_t i = 0; i < r.indices.size(); ++i) idx += (i ? "," : "") + std::to_string(r.indices[i]);
        std::cout << "subset size=" << r.size << " indices=" << idx << " approximate=" << (r.approximate ? "true" : "false")
                  << '\n';
    }
    if (c.lp) {
        if (!m.commutative()) throw Error("--lp: the linear-programming route needs a classical model");
        const auto meas = lp_discrimination(m, states, c.tol);
        std::cout << "lp feasible=" << (meas ? "true" : "false") << '\n';
        if (meas) {
            for (const auto& e : meas->effects()) std::cout << io::write_effect(e);
        }
    }
    return kExitOk;
}

int simulate(const Config& c) {
    if (c.n == 0) throw Error("--n: must be positive");
    std::vector<TrialRecord> records;
    if (c.q) {
        if (!(*c.q >= 0.0 && *c.q <= 1.0)) throw Error("--q: must lie in [0, 1]");
        records.push_back(simulate_bernoulli(*c.q, c.n, c.seed, c.stream));
    } else {
        const auto m = resolve_model(c);
        if (c.state_file.empty()) throw Error("--state: required unless --q is given");
        const auto s = read_state_for(m, c.state_file, "--state", c.tol);
        const int chosen = (c.all_fiducials ? 1 : 0) + (c.fiducial ? 1 : 0) + (c.effect_file.empty() ? 0 : 1);
        if (chosen != 1) throw Error("--effect: give exactly one of --effect, --fiducial, --all-fiducials");
        if (c.all_fiducials) {
            records = simulate_fiducials(m, s, c.n, c.seed, c.tol);
        } else if (c.fiducial) {
            if (c.fiducial > static_cast<std::size_t>(m.k())) throw Error("--fiducial: must lie in [1, K]");
            records.push_back(simulate_trials(m, s, m.fiducial(static_cast<int>(c.fiducial - 1)), c.n, c.seed,
                                              c.stream, c.tol));
        } else {
            auto in = open_input(c.effect_file, "--effect");
            const EffectVector e = io::read_effect(in);
            records.push_back(simulate_trials(m, s, e, c.n, c.seed, c.stream, c.tol));
        }
    }
    std::cout << io::kTrialHeader << '\n';
    for (const auto& r : records) std::cout << io::write_trial(r) << '\n';
    return kExitOk;
}

int tomo(const Config& c) {
    const auto m = resolve_model(c);
    auto in = open_input(c.counts_file, "--counts");
    const auto records = io::read_trials(in);
    const auto est = tomographic_estimate(m, records, c.tol);
    std::optional<double> distance;
    if (!c.truth_file.empty()) {
        const auto truth = read_state_for(m, c.truth_file, "--truth", c.tol);
        distance = (linalg::view(est.p_hat.entries()) - linalg::view(truth.entries())).norm();
    }
    if (c.format == "csv") {
        std::cout << "model,projected,distance_to_truth";
        for (int i = 1; i <= m.k(); ++i) std::cout << ",p_" << i;
        std::cout << '\n' << csv_field(m.id()) << ',' << (est.projected ? "true" : "false") << ','
                  << (distance ? io::format_double(*distance) : "");
        for (double x : est.p_hat.entries()) std::cout << ',' << io::format_double(x);
        std::cout << '\n';
        return kExitOk;
    }
    std::cout << io::write_state(est.p_hat) << "projected=" << (est.projected ? "true" : "false") << '\n';
    if (distance) std::cout << "distance_to_truth=" << io::format_double(*distance) << '\n';
    return kExitOk;
}

void add_model_options(CLI::App* sub, Config& c) {
    sub->add_option("--model", c.kind, "model kind")->check(CLI::IsMember({"classical", "quantum"}));
    sub->add_option("--dim", c.dim, "dimension N (classical 1..256, quantum 2..8)");
    sub->add_option("--model-file", c.model_file, "model file (overrides --model/--dim)")->check(CLI::ExistingFile);
    sub->add_option("--restrict", c.restrict_to, "restrict a quantum model to these 0-based basis indices")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    Config c;
    CLI::App app{"gptkit: operational probabilistic models, axiom audits, and simulations"};
    app.require_subcommand(1);
    app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"table", "csv"}))->capture_default_str();
    for (const auto& t : kToleranceFlags) {
        app.add_option(std::string("--tol-") + t.name, c.tol.*(t.field), t.help)
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    auto* info_cmd = app.add_subcommand("info", "print N, K and the fiducial measurements");
    add_model_options(info_cmd, c);

    auto* audit_cmd = app.add_subcommand("audit", "run axiom audits and print reports");
    audit_cmd->add_option("axiom", c.axiom, "simplicity, subspaces, composites, continuity or all")
        ->required()
        ->check(CLI::IsMember({"simplicity", "subspaces", "composites", "continuity", "all"}));
    add_model_options(audit_cmd, c);
    audit_cmd->add_option("--seed", c.seed, "sampling seed")->capture_default_str();
    audit_cmd->add_option("--subspace-dim", c.subspace_dim, "subspace dimension M (default N-1)")
        ->check(CLI::PositiveNumber);
    audit_cmd->add_option("--subspace-samples", c.subspace_samples, "states sampled by the subspace audit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    audit_cmd->add_option("--dim-b", c.dim_b, "dimension of the second factor in the composites audit")
        ->capture_default_str();
    audit_cmd->add_option("--samples", c.samples, "grid points per continuity path")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000));
    audit_cmd->add_option("--pairs", c.pairs, "random pure pairs in the continuity audit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    audit_cmd->add_flag("--expect-violation", c.expect_violation,
                        "exit 0 when some audit is violated and 2 when none is");

    auto* dist_cmd = app.add_subcommand("distinguish", "certify perfect single-shot distinguishability");
    add_model_options(dist_cmd, c);
    dist_cmd->add_option("--states", c.states_file, "file of state blocks")->required();
    dist_cmd->add_flag("--subset", c.subset, "also report the largest distinguishable subset");
    dist_cmd->add_flag("--lp", c.lp, "also solve the classical linear feasibility route");

    auto* sim_cmd = app.add_subcommand("simulate", "simulate yes/no trials and print trial records");
    add_model_options(sim_cmd, c);
    sim_cmd->add_option("--q", c.q, "success probability for a bare Bernoulli run");
    sim_cmd->add_option("--n", c.n, "trials per record")->required();
    sim_cmd->add_option("--seed", c.seed, "generator seed")->required();
    sim_cmd->add_option("--stream", c.stream, "generator stream id (single-record runs)")->capture_default_str();
    sim_cmd->add_option("--state", c.state_file, "state file");
    sim_cmd->add_option("--effect", c.effect_file, "effect file");
    sim_cmd->add_option("--fiducial", c.fiducial, "1-based fiducial measurement")->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--all-fiducials", c.all_fiducials, "one record per fiducial, stream = fiducial index");

    auto* tomo_cmd = app.add_subcommand("tomo", "estimate a state from fiducial trial records");
    add_model_options(tomo_cmd, c);
    tomo_cmd->add_option("--counts", c.counts_file, "trial-record CSV, one row per fiducial")->required();
    tomo_cmd->add_option("--truth", c.truth_file, "true state file; prints the Euclidean distance");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "gptkit: error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (*info_cmd) return info(c);
        if (*audit_cmd) return audit(c);
        if (*dist_cmd) return distinguish(c);
        if (*sim_cmd) return simulate(c);
        return tomo(c);
    } catch (const std::exception& e) {
        std::cerr << "gptkit: error: " << e.what() << '\n';
        return kExitInput;
    }
}
