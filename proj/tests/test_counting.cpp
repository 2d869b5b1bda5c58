#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spectriples/counting.hpp"

using namespace spectriples;

namespace {

const Potential one = Potential::constant(1.0);
const double mathieu_length = 40.0 * kPi;

SpectrumList listed(std::vector<double> v) {
  SpectrumList s;
  s.values = Eigen::Map<Eigen::VectorXd>(v.data(), Index(v.size()));
  s.multiplicity.assign(v.size(), 1);
  s.source = "listed";
  return s;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::invalid_value;
}

ModelProblem mathieu(Index nodes) {
  return build_interval_m1(mathieu_length, nodes, Potential::mathieu(2.0, 3.0));
}

}  // namespace

TEST_CASE("find_gaps") {
  auto gaps = find_gaps(listed({1, 2, 5}), {0.5, 6.0}, 1.0);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].alpha == 2.0);
  CHECK(gaps[0].beta == 5.0);
  CHECK(find_gaps(listed({1, 1.1, 1.2, 1.3}), {0.0, 2.0}, 0.5).empty());
  CHECK(find_gaps(listed({1, 2}), {0.0, 3.0}, 1.0).empty());  // width equal to the minimum
}

TEST_CASE("Mathieu gaps are stable and empty") {
  std::vector<std::vector<SpectralGap>> runs;
  for (Index n : {1000, 2000}) {
    const Realization r = dirichlet_realization(mathieu(n));
    const auto gaps = find_gaps(spectrum(r), {0.0, 8.0}, 0.2);
    REQUIRE(gaps.size() >= 2);
    for (const auto& g : gaps) {
      CHECK(count_direct(r, {g.alpha, g.beta}) == 0);
      // gap inequality ||(2A - (a + b))f|| >= (b - a)||f|| on eigenvectors
      for (double lambda : spectrum(r).values) CHECK(std::abs(2.0 * lambda - g.alpha - g.beta) >= g.width() - 1e-12);
    }
    runs.push_back(gaps);
  }
  CHECK(runs[1][0].alpha == doctest::Approx(runs[0][0].alpha).epsilon(0.01));
  CHECK(runs[1][0].beta == doctest::Approx(runs[0][0].beta).epsilon(0.01));
}

TEST_CASE("count_direct") {
  const ModelProblem half = build_halfline_m1(40.0, 2000, one);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(count_direct(realization_with_k(half, KSpec::constant(-2.0)), {-inf, 0.0}) == 1);
  CHECK(count_direct(realization_with_k(half, KSpec::constant(-2.0)), {0.0, 0.0}) == 0);
  const Realization d = dirichlet_realization(build_interval_m1(1.0, 2000, one));
  CHECK(count_direct(d, {0.0, 160.0}) == 4);
  CHECK(count_direct(d, {0.0, 50.0}) == 2);
}

TEST_CASE("negative counts from the boundary") {
  const ModelProblem half = build_halfline_m1(40.0, 2000, one);
  CHECK(count_negative_formula(half, KSpec::constant(-2.0)).formula_count == 1);
  CHECK(count_negative_formula(half, KSpec::constant(-0.5)).formula_count == 0);

  // (-Lambda(0))^{-1/2} is 1 on the half-line, so the boundary matrix is 1 + sigma
  const MatrixXc root = negative_root(calderon(half, 0.0));
  CHECK(std::abs(root(0, 0) - 1.0) < 1e-4);

  const ModelProblem line = build_interval_m1(1.0, 2000, one);
  CHECK(count_negative_formula(line, KSpec::constant(-1.0)).formula_count == 1);
  CHECK(count_negative_formula(line, KSpec::constant(-3.0)).formula_count == 2);

  // -Lambda(0) has eigenvalues tanh(1/2) and coth(1/2)
  const Eigen::VectorXd minus_lambda = hermitian_eigenvalues(MatrixXc(-calderon(line, 0.0).matrix), 1e-8);
  CHECK(minus_lambda(0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-5));
  CHECK(minus_lambda(1) == doctest::Approx(1.0 / std::tanh(0.5)).epsilon(1e-5));

  for (double sigma : {-3.0, -2.0, -0.5}) {
    const CountReport r = verify_negative_count(half, KSpec::constant(sigma));
    CHECK(r.agree());
  }
}

TEST_CASE("counts are monotone in sigma") {
  const ModelProblem line = build_interval_m1(1.0, 500, one);
  const ModelProblem ring = build_annulus_m1(1.0, 2.0, 100, 8, one);
  for (const ModelProblem* p : {&line, &ring}) {
    Index previous = std::numeric_limits<Index>::max();
    for (double sigma = -6.0; sigma <= 1.0; sigma += 0.25) {
      const CountReport r = verify_negative_count(*p, KSpec::constant(sigma));
      CHECK(r.agree());
      CHECK(r.formula_count <= previous);
      previous = r.formula_count;
    }
  }
}

TEST_CASE("counting errors") {
  const ModelProblem line = build_interval_m1(1.0, 200, one);
  // q = -5 keeps 0 out of the Dirichlet spectrum but Lambda(0) picks up a positive eigenvalue
  const ModelProblem bent = build_interval_m1(1.0, 200, Potential::constant(-5.0));
  CHECK(kind_of([&] { count_negative_formula(bent, KSpec::constant(-1.0)); }) == ErrorKind::calderon_not_negative);
  MatrixXc skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK(kind_of([&] { count_negative_formula(line, KSpec::dense_matrix(skew)); }) == ErrorKind::not_hermitian_k);
  CHECK(kind_of([&] { count_negative_formula(line, KSpec::constant(Complex(0, 1))); }) ==
        ErrorKind::not_hermitian_k);

  const SpectralGap wide{0.0, 50.0, "test"};
  CHECK(kind_of([&] { gap_count_formula(line, KSpec::constant(-1.0), wide, 1.0); }) == ErrorKind::not_a_gap);
  const SpectralGap low{-10.0, 5.0, "test"};
  CHECK(kind_of([&] { gap_count_formula(line, KSpec::constant(-1.0), low, 15.0); }) == ErrorKind::epsilon_too_large);
  CHECK(kind_of([&] { gap_count_formula(line, KSpec::constant(-1.0), low, 0.0); }) == ErrorKind::invalid_value);
  CHECK(kind_of([&] { left_edge_buffer(line, KSpec::constant(-1.0), low, {}); }) == ErrorKind::invalid_config);
}

TEST_CASE("gap count below the spectrum reproduces the negative count") {
  // on (-10, 0] the gap formula reduces to the negative-count formula, since T(0) = 0
  const ModelProblem half = build_halfline_m1(40.0, 2000, one);
  const SpectralGap g{-10.0, 0.01, "below"};
  for (double sigma : {-3.0, -2.0, -1.5, -0.5, 0.5}) {
    CAPTURE(sigma);
    const CountReport gap = verify_gap_count(half, KSpec::constant(sigma), g, 0.01);
    CHECK(gap.agree());
    CHECK(gap.formula_count == count_negative_formula(half, KSpec::constant(sigma)).formula_count);
  }
}

TEST_CASE("Mathieu gap counts") {
  const ModelProblem p = mathieu(1000);
  const auto gaps = find_gaps(spectrum(dirichlet_realization(p)), {0.0, 8.0}, 0.2);
  REQUIRE(gaps.size() >= 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (double sigma : {-1.5, -1.0, -0.5, -0.25})
      for (double fraction : {0.02, 0.05, 0.1}) {
        CAPTURE(i);
        CAPTURE(sigma);
        CAPTURE(fraction);
        const CountReport r = verify_gap_count(p, KSpec::constant(sigma), gaps[i], fraction * gaps[i].width());
        CHECK(r.agree());
      }

  const double eps0 = left_edge_buffer(p, KSpec::constant(-1.0), gaps[0],
                                       {0.1 * gaps[0].width(), 0.5 * gaps[0].width(), 0.9 * gaps[0].width()});
  CHECK(eps0 > 0.0);
}

TEST_CASE("left_edge_buffer takes the whole grid when the gap stays empty") {
  // sigma = 0 on the half-line leaves nothing below q = 1
  const ModelProblem half = build_halfline_m1(40.0, 2000, one);
  const SpectralGap g{-10.0, 0.5, "below"};
  const KSpec k = KSpec::constant(0.0);
  REQUIRE(count_direct(realization_with_k(half, k), {g.alpha, g.beta}) == 0);
  const std::vector<double> grid{0.5, 2.0, 7.5};
  CHECK(left_edge_buffer(half, k, g, grid) == 7.5);
  // with sigma = -2 the eigenvalue -3 caps the buffer below 7
  CHECK(left_edge_buffer(half, KSpec::constant(-2.0), g, grid) == 2.0);
}

TEST_CASE("sector check") {
  const ModelProblem half = build_halfline_m1(20.0, 400, one);
  const Realization positive = dirichlet_realization(half);
  CHECK(sector_check(positive, 0.0, 0.0, 1e-6));
  const Realization negative = realization_with_k(half, KSpec::constant(-2.0));
  CHECK_FALSE(sector_check(negative, 0.0, 0.0, 1e-6));
  // shifting the vertex below the spectrum restores the degenerate sector
  const double bottom = spectrum(negative).values(0);
  CHECK(sector_check(negative, bottom - 1.0, 0.0, 1e-6));

  const Realization rotated = realization_with_k(half, KSpec::constant(std::polar(0.5, kPi / 6.0)));
  CHECK(sector_check(rotated, 0.0, kPi / 6.0, 1e-6));
}

TEST_CASE("the +T reading of the gap formula miscounts") {
  // eigenvalue -3 in (-10, 0): the -T form finds it, the +T form does not
  const ModelProblem half = build_halfline_m1(40.0, 2000, one);
  const SpectralGap g{-10.0, 0.01, "below"};
  const KSpec k = KSpec::constant(-2.0);
  CHECK(gap_count_formula(half, k, g, 0.01, RootConvention::negative_root).formula_count == 1);
  CHECK(gap_count_formula(half, k, g, 0.01, RootConvention::as_written).formula_count != 1);
  CHECK(root_convention_from_string("as_written") == RootConvention::as_written);
}
