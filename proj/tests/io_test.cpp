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
#include "gptkit/io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "gptkit/audit.hpp"
#include "gtest/gtest.h"
#include "oracle.hpp"

using namespace gptkit;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

class TempDir {
   public:
    TempDir() : path_(fs::temp_directory_path() / ("gptkit_io_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }

   private:
    fs::path path_;
};

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
    oracle::Sampler rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.uniform() * 40) - 20);
        ASSERT_EQ(io::parse_double(io::format_double(x), "x"), x);
    }
    EXPECT_EQ(io::parse_double(io::format_double(std::numeric_limits<double>::denorm_min()), "x"),
              std::numeric_limits<double>::denorm_min());
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(State, Format) {
    const auto m = classical_model(3);
    EXPECT_EQ(io::write_state(m.state({0.25, 0.75, 0})), "state K=3 model=classical(3)\n0.25,0.75,0\n");
    EXPECT_EQ(io::write_effect(m.effect({1, 0, 0.5})), "effect K=3 model=classical(3)\n1,0,0.5\n");
}

TEST(State, RoundTrip) {
    const std::vector<ModelDescriptor> models = {classical_model(4), quantum_model(2), quantum_model(3),
                                                 compose(quantum_model(2), quantum_model(2)),
                                                 restrict_to_subspace(quantum_model(3), {3, {0, 2}})};
    for (const auto& m : models) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto s = random_state(m, seed);
            ASSERT_EQ(io::parse_state(io::write_state(s)), s) << m.id();
            const EffectVector e(std::vector<double>(s.entries().begin(), s.entries().end()), m.id());
            ASSERT_EQ(io::parse_effect(io::write_effect(e)), e);
        }
    }
}

TEST(State, ReadManyWithComments) {
    const std::string text =
        "# two qubit states\n"
        "state K=2 model=classical(2)\n1,0\n\n"
        "  state K=2 model=classical(2)  \n 0 , 1 \n";
    std::istringstream in(text);
    const auto s = io::read_states(in);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1], StateVector({0, 1}, "classical(2)"));
}

TEST(State, Errors) {
    EXPECT_EQ(error_of([] { io::parse_state("state K=3 model=classical(3)\n1,0\n"); }),
              "state entries: header says K=3 but line has 2 values");
    EXPECT_EQ(error_of([] { io::parse_state("state K=2 model=classical(2)\n1,x\n"); }),
              "state entries: malformed number 'x'");
    EXPECT_EQ(error_of([] { io::parse_state("state K=2\n1,0\n"); }), "state: missing field 'model'");
    EXPECT_EQ(error_of([] { io::parse_state("effect K=2 model=classical(2)\n1,0\n"); }),
              "header: expected 'state', got 'effect'");
    EXPECT_EQ(error_of([] { io::parse_state("state K=2 model=classical(2)\n"); }), "state: missing value line");
    EXPECT_EQ(error_of([] { io::parse_state(""); }), "state: missing header line");
    EXPECT_EQ(error_of([] { io::parse_state("state K=-2 model=m\n1\n"); }),
              "state K: malformed non-negative integer '-2'");
}

TEST(Density, RoundTrip) {
    oracle::Sampler rng(6);
    for (int n = 1; n <= 4; ++n) {
        const CMatrix rho = rng.density(n);
        EXPECT_EQ(io::parse_density(io::write_density(rho)), rho);
    }
    EXPECT_EQ(io::write_density(CMatrix::Identity(2, 2) * 0.5), "0.5,0,0,0\n0,0,0.5,0\n");
}

TEST(Density, Errors) {
    EXPECT_EQ(error_of([] { io::parse_density("1,0,0\n"); }),
              "density matrix row 1: odd number of values (expected re,im pairs)");
    EXPECT_EQ(error_of([] { io::parse_density("1,0,0,0\n"); }), "density matrix: expected 2 rows");
    EXPECT_EQ(error_of([] { io::parse_density("1,0,0,0\n0,0\n"); }), "density matrix row 2: expected 4 values");
}

TEST(Trial, RoundTrip) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = simulate_bernoulli(0.1 * static_cast<double>(seed % 10) + 0.03, 1000 + seed, seed);
        ASSERT_EQ(io::parse_trial(io::write_trial(r)), r);
    }
    EXPECT_EQ(io::write_trial({10, 3, 0.25, 7}), "10,3,0.25,7");
    std::istringstream in("n,k,q_true,seed\n10,3,0.25,7\n5,5,1,0\n");
    const auto rs = io::read_trials(in);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[1], (TrialRecord{5, 5, 1.0, 0}));
}

TEST(Trial, Errors) {
    EXPECT_EQ(error_of([] { io::parse_trial("10,3,0.5"); }),
              "trial record: expected 4 fields n,k,q_true,seed, got 3");
    EXPECT_EQ(error_of([] { io::parse_trial("10,11,0.5,1"); }), "trial record k: exceeds n");
    EXPECT_EQ(error_of([] { io::parse_trial("10,-1,0.5,1"); }), "trial record k: malformed non-negative integer '-1'");
    EXPECT_EQ(error_of([] { io::parse_trial("ten,1,0.5,1"); }), "trial record n: malformed non-negative integer 'ten'");
}

TEST(Certificate, RoundTripDistinguishable) {
    const auto m = quantum_model(3);
    const std::vector<StateVector> s = {rho_to_p(m, DensityMatrix::pure(oracle::basis(3, 0))),
                                        rho_to_p(m, DensityMatrix::pure(oracle::basis(3, 1)))};
    const auto cert = perfectly_distinguishable(m, s);
    const auto text = io::write_certificate(cert, m, s.size());
    EXPECT_EQ(text.rfind("certificate distinguishable=true states=2 model=quantum(3) tolerance=1.0000000000000001e-09", 0), 0u);
    const auto back = io::parse_certificate(text, m);
    EXPECT_TRUE(back.distinguishable);
    ASSERT_TRUE(back.measurement);
    ASSERT_EQ(back.measurement->outcome_count(), 2u);
    for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(back.measurement->effects()[l], cert.measurement->effects()[l]);
    EXPECT_EQ(io::write_certificate(back, m, s.size()), text);
}

TEST(Certificate, RoundTripWitness) {
    const auto m = quantum_model(2);
    const std::vector<StateVector> s = {rho_to_p(m, DensityMatrix::pure(oracle::basis(2, 0))),
                                        rho_to_p(m, DensityMatrix::pure(oracle::superpose(2, 0, 1, 1.0)))};
    const auto cert = perfectly_distinguishable(m, s);
    const auto text = io::write_certificate(cert, m, s.size());
    EXPECT_NE(text.find("\nwitness i=0 j=1 overlap=0.5"), std::string::npos);
    const auto back = io::parse_certificate(text, m);
    EXPECT_FALSE(back.distinguishable);
    ASSERT_TRUE(back.failure_witness);
    EXPECT_EQ(back.failure_witness->overlap, cert.failure_witness->overlap);
    EXPECT_EQ(io::write_certificate(back, m, s.size()), text);
}

TEST(Certificate, WrongModel) {
    const auto m = classical_model(2);
    const std::vector<StateVector> s = {m.state({1, 0}), m.state({0, 1})};
    const auto text = io::write_certificate(perfectly_distinguishable(m, s), m, 2);
    EXPECT_THROW(io::parse_certificate(text, classical_model(3)), Error);
}

TEST(Report, MetricNamesMayContainEquals) {
    const AuditReport r(Axiom::simplicity, Verdict::pass, {{"K(N=2)", 4}, {"x", 0.1}}, {}, "some note");
    const auto text = write_report(r);
    EXPECT_EQ(text, "axiom=simplicity verdict=pass\nmetric K(N=2)=4\nmetric x=0.10000000000000001\nnote some note\n");
    EXPECT_EQ(parse_report(text), r);
}

TEST(Report, Errors) {
    EXPECT_THROW(parse_report(""), Error);
    EXPECT_THROW(parse_report("verdict=pass axiom=simplicity\n"), Error);
    EXPECT_THROW(parse_report("axiom=simplicity verdict=maybe\n"), Error);
    EXPECT_THROW(parse_report("axiom=simplicity verdict=pass\nbogus\n"), Error);
}

TEST(ModelFile, Basic) {
    TempDir dir;
    EXPECT_EQ(io::read_model_file(dir.write("q.txt", "# a qutrit\nmodel kind=quantum N=3\n")).id(), "quantum(3)");
    EXPECT_EQ(io::read_model_file(dir.write("c.txt", io::write_model_line(classical_model(5)))).id(), "classical(5)");
    dir.write("q2.txt", "model kind=quantum N=2\n");
    const auto comp = io::read_model_file(dir.write("ab.txt", "model kind=composite a=q2.txt b=q.txt\n"));
    EXPECT_EQ(comp.n(), 6);
    EXPECT_EQ(comp.k(), 36);
}

TEST(ModelFile, Errors) {
    TempDir dir;
    EXPECT_EQ(error_of([&] { io::read_model_file(dir.write("a.txt", "model kind=cubic N=2\n")); }),
              "model file: unknown kind 'cubic'");
    EXPECT_EQ(error_of([&] { io::read_model_file(dir.write("b.txt", "model kind=quantum\n")); }),
              "model file: missing field 'N'");
    EXPECT_EQ(error_of([&] { io::read_model_file(dir.write("c.txt", "model kind=quantum N=two\n")); }),
              "model file N: malformed non-negative integer 'two'");
    EXPECT_NE(error_of([&] { io::read_model_file(dir.write("d.txt", "model kind=composite a=d.txt b=d.txt\n")); }),
              "");
    EXPECT_EQ(error_of([&] { io::read_model_file("/nonexistent/model.txt"); }),
              "model file: cannot open /nonexistent/model.txt");
}

TEST(ParseDouble, RejectsNonFiniteAndJunk) {
    for (const char* bad : {"", "inf", "nan", "-inf", "1e999", "1.5x", " 1", "0x10"}) {
        EXPECT_THROW(io::parse_double(bad, "f"), Error) << bad;
    }
    EXPECT_EQ(io::parse_double("-2.5e-3", "f"), -2.5e-3);
}
