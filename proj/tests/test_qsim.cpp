#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qnn_forge/error.hpp"
#include "qnn_forge/gradcheck.hpp"
#include "qnn_forge/qsim.hpp"
#include "qnn_forge/rng.hpp"

using namespace qnn_forge;
using std::numbers::pi;

namespace {

StateVector random_state(CounterRng& rng, int n) {
  std::vector<cplx> amps(std::size_t{1} << (n + 1));
  double norm2 = 0.0;
  for (cplx& a : amps) {
    a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    norm2 += std::norm(a);
  }
  for (cplx& a : amps) a /= std::sqrt(norm2);
  return StateVector(n, amps);
}

std::string random_letters(CounterRng& rng, int wires) {
  static constexpr char kLetters[] = "IXYZ";
  std::string s;
  for (int w = 0; w < wires; ++w) s += kLetters[rng.below(4)];
  return s;
}

double max_dev(const StateVector& a, const StateVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::size_t hot_index(const StateVector& s) {
  std::size_t hot = s.dim();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (s[i] == cplx(1.0, 0.0)) {
      EXPECT_EQ(hot, s.dim()) << "more than one nonzero amplitude";
      hot = i;
    } else {
      EXPECT_EQ(s[i], cplx(0.0, 0.0));
    }
  }
  return hot;
}

}  // namespace

TEST(PauliString, ParseAndMasks) {
  const PauliString p = PauliString::parse("XYZ");
  EXPECT_EQ(p.n(), 2);
  EXPECT_EQ(p.str(), "XYZ");
  EXPECT_EQ(p.x_mask(), 0b110u);
  EXPECT_EQ(p.z_mask(), 0b011u);
  EXPECT_THROW(PauliString::parse("XQ"), InvalidInputError);
  EXPECT_THROW(PauliString::parse(""), InvalidInputError);
}

TEST(PauliString, InvolutionOnRandomStates) {
  CounterRng rng(11, Stream::kTestCases);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.below(4));
    const PauliString p = PauliString::parse(random_letters(rng, n + 1));
    const StateVector psi = random_state(rng, n);
    std::vector<cplx> once(psi.dim()), twice(psi.dim());
    p.apply(psi.amps(), once);
    p.apply(once, twice);
    for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_LE(std::abs(twice[i] - psi[i]), 1e-12);
  }
}

TEST(PauliString, MatchesDenseMatrix) {
  CounterRng rng(12, Stream::kTestCases);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.below(3));
    const std::string letters = random_letters(rng, n + 1);
    const StateVector psi = random_state(rng, n);
    std::vector<cplx> out(psi.dim());
    PauliString::parse(letters).apply(psi.amps(), out);
    const oracle::Vec expected =
        oracle::pauli_matrix(letters) * Eigen::Map<const oracle::Vec>(psi.amps().data(), psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_LE(std::abs(out[i] - expected(i)), 1e-14);
  }
}

TEST(BasisState, Encoding) {
  EXPECT_EQ(hot_index(basis_state(std::vector<int>{1})), 0b01u);
  EXPECT_EQ(hot_index(basis_state(std::vector<int>{-1, -1})), 0b111u);
  EXPECT_EQ(hot_index(basis_state(std::vector<int>{1, -1})), 0b011u);
  EXPECT_THROW(basis_state(std::vector<int>{1, 0}), InvalidInputError);
}

TEST(Rotation, IdentityAtZero) {
  CounterRng rng(13, Stream::kTestCases);
  const StateVector psi = random_state(rng, 2);
  const StateVector out = apply_pauli_rotation(psi, PauliString::parse("XYZ"), 0.0);
  EXPECT_EQ(max_dev(out, psi), 0.0);
}

TEST(Rotation, QuarterTurnOfX) {
  // Single wire: the readout wire alone, n = 0.
  const StateVector zero(0, {1.0, 0.0});
  const StateVector out = apply_pauli_rotation(zero, PauliString::parse("X"), pi / 2);
  EXPECT_NEAR(std::abs(out[0]), 0.0, 1e-15);
  EXPECT_NEAR(out[1].real(), 0.0, 1e-15);
  EXPECT_NEAR(out[1].imag(), -1.0, 1e-15);
}

TEST(Rotation, MatchesMatrixExponential) {
  CounterRng rng(14, Stream::kTestCases);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.below(3));
    const std::string letters = random_letters(rng, n + 1);
    const double theta = rng.uniform(-2 * pi, 2 * pi);
    const StateVector psi = random_state(rng, n);
    const StateVector out = apply_pauli_rotation(psi, PauliString::parse(letters), theta);
    const oracle::Vec expected = oracle::rotation_expm(letters, theta) *
                                 Eigen::Map<const oracle::Vec>(psi.amps().data(), psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_LE(std::abs(out[i] - expected(i)), 1e-10);
  }
}

TEST(Rotation, UnitarityAndInverse) {
  CounterRng rng(15, Stream::kTestCases);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.below(4));
    const PauliString p = PauliString::parse(random_letters(rng, n + 1));
    const double theta = rng.uniform(-10.0, 10.0);
    const StateVector psi = random_state(rng, n);
    const StateVector out = apply_pauli_rotation(psi, p, theta);
    EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    EXPECT_LE(max_dev(apply_pauli_rotation(out, p, -theta), psi), 1e-12);
  }
}

TEST(Rotation, LengthMismatch) {
  const StateVector psi = basis_state(std::vector<int>{1});
  EXPECT_THROW(apply_pauli_rotation(psi, PauliString::parse("XYZ"), 0.1), DimensionError);
}

TEST(Sequence, ZeroAnglesReturnInput) {
  const Circuit c = reference_ansatz(2, 2);
  const StateVector psi = basis_state(std::vector<int>{1, -1});
  const std::vector<double> zeros(c.size(), 0.0);
  EXPECT_EQ(max_dev(apply_sequence(psi, c, zeros), psi), 0.0);
}

TEST(Sequence, SingleGateIsRotation) {
  CounterRng rng(16, Stream::kTestCases);
  const PauliString p = PauliString::parse("YZ");
  const Circuit c(1, {{p, 1}});
  const StateVector psi = random_state(rng, 1);
  const std::vector<double> theta{0.7};
  EXPECT_EQ(max_dev(apply_sequence(psi, c, theta), apply_pauli_rotation(psi, p, 0.7)), 0.0);
}

TEST(Sequence, CommutingGatesAddAngles) {
  CounterRng rng(17, Stream::kTestCases);
  const PauliString p = PauliString::parse("XZI");
  const Circuit c(2, {{p, 1}, {p, 2}});
  const StateVector psi = random_state(rng, 2);
  const std::vector<double> thetas{0.3, 1.1};
  const StateVector out = apply_sequence(psi, c, thetas);
  const oracle::Vec expected = oracle::rotation_expm("XZI", 0.3) * oracle::rotation_expm("XZI", 1.1) *
                               Eigen::Map<const oracle::Vec>(psi.amps().data(), psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_LE(std::abs(out[i] - expected(i)), 1e-12);
  EXPECT_LE(max_dev(out, apply_pauli_rotation(psi, p, 1.4)), 1e-12);
}

TEST(Sequence, AngleCountMismatch) {
  const Circuit c = reference_ansatz(1, 1);
  const std::vector<double> thetas{0.1};
  EXPECT_THROW(apply_sequence(basis_state(std::vector<int>{1}), c, thetas), DimensionError);
}

TEST(PredictedLabel, ZeroAnglesGiveMinusOne) {
  const Circuit c = reference_ansatz(2, 1);
  const std::vector<double> zeros(c.size(), 0.0);
  const std::vector<int> z{1, -1};
  EXPECT_EQ(predicted_label(c, zeros, z, readout_observable(2)), -1.0);
}

TEST(PredictedLabel, SingleReadoutRotation) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{pi / 8};
  const double l = predicted_label(c, theta, std::vector<int>{}, readout_observable(0));
  EXPECT_NEAR(l, -0.70710678118654757, 1e-15);
}

TEST(PredictedLabel, BoundedOnRandomCircuits) {
  CounterRng rng(18, Stream::kTestCases);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int gates = 1 + static_cast<int>(rng.below(12));
    const Circuit c = random_circuit(rng, n, gates);
    std::vector<double> thetas(gates);
    for (double& t : thetas) t = rng.uniform(-pi, pi);
    std::vector<int> z(n);
    for (int& zi : z) zi = rng.below(2) ? 1 : -1;
    for (PauliOp op : {PauliOp::X, PauliOp::Y, PauliOp::Z}) {
      const double l = predicted_label(c, thetas, z, readout_observable(n, op));
      EXPECT_LE(std::abs(l), 1.0 + 1e-12);
    }
  }
}

TEST(PredictedLabel, PeriodPiInEachAngle) {
  CounterRng rng(19, Stream::kTestCases);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int gates = 1 + static_cast<int>(rng.below(6));
    const Circuit c = random_circuit(rng, n, gates);
    std::vector<double> thetas(gates);
    for (double& t : thetas) t = rng.uniform(-pi, pi);
    const std::vector<int> z(n, -1);
    const double base = predicted_label(c, thetas, z, readout_observable(n));
    std::vector<double> shifted = thetas;
    shifted[rng.below(gates)] += pi;
    EXPECT_NEAR(predicted_label(c, shifted, z, readout_observable(n)), base, 1e-10);
  }
}

TEST(PredictedLabel, RejectsNonReadoutObservable) {
  const Circuit c = reference_ansatz(1, 1);
  const std::vector<double> zeros(c.size(), 0.0);
  const std::vector<int> z{1};
  EXPECT_THROW(predicted_label(c, zeros, z, PauliString::parse("ZZ")), InvalidObservableError);
  EXPECT_THROW(predicted_label(c, zeros, z, PauliString::parse("II")), InvalidObservableError);
}

TEST(SampleLabel, DegenerateDistribution) {
  const Circuit c = reference_ansatz(1, 1);
  const std::vector<double> zeros(c.size(), 0.0);
  const std::vector<int> z{1};
  EXPECT_EQ(sample_label(c, zeros, z, readout_observable(1), 1000, 5), -1.0);
}

TEST(SampleLabel, SingleShotIsPlusMinusOne) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{pi / 8};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double s = sample_label(c, theta, std::vector<int>{}, readout_observable(0), 1, seed);
    EXPECT_TRUE(s == 1.0 || s == -1.0);
  }
}

TEST(SampleLabel, WithinThreeSigma) {
  const Circuit c(0, {{PauliString::parse("X"), 1}});
  const std::vector<double> theta{0.9};
  const PauliString obs = readout_observable(0);
  const double exact = predicted_label(c, theta, std::vector<int>{}, obs);
  const std::uint64_t shots = 100000;
  const double mean = sample_label(c, theta, std::vector<int>{}, obs, shots, 42);
  EXPECT_LE(std::abs(mean - exact), 3.0 * std::sqrt((1.0 - exact * exact) / shots));
  EXPECT_EQ(mean, sample_label(c, theta, std::vector<int>{}, obs, shots, 42));
  EXPECT_THROW(sample_label(c, theta, std::vector<int>{}, obs, 0, 42), InvalidInputError);
}

TEST(Loss, Values) {
  EXPECT_EQ(loss(-1, -1.0), 0.0);
  EXPECT_EQ(loss(1, -1.0), 2.0);
  EXPECT_EQ(loss(1, 0.0), 1.0);
}

TEST(StateVector, Validation) {
  EXPECT_THROW(StateVector(1, {1.0, 0.0}), DimensionError);
  EXPECT_THROW(StateVector(0, {1.0, 1.0}), InvalidInputError);
  EXPECT_THROW(StateVector(13, {}), DimensionError);
}
