#include "support.hpp"

#include "gausscorr/errors.hpp"

#include <doctest.h>

using namespace gausscorr;
using namespace gausscorr::testing;

TEST_CASE("CovMatrix validates shape and symmetry") {
  CHECK_THROWS_AS(CovMatrix(Matrix::Identity(3, 3)), InvalidInput);
  Matrix g = Matrix::Identity(4, 4);
  g(0, 1) = 0.3;
  CHECK_THROWS_AS(CovMatrix{g}, InvalidInput);
  g(1, 0) = 0.3;
  CHECK_NOTHROW(CovMatrix{g});
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(CovMatrix{bad}, InvalidInput);
}

TEST_CASE("factories") {
  CHECK(max_abs_diff(CovMatrix::vacuum(3).gamma(), Matrix::Identity(6, 6)) == 0.0);
  CHECK(CovMatrix::thermal(2.5)(1, 1) == doctest::Approx(2.5));
  const CovMatrix t = CovMatrix::tmsv(3.0);
  CHECK(t(0, 2) == doctest::Approx(std::sqrt(8.0)));
  CHECK(t(1, 3) == doctest::Approx(-std::sqrt(8.0)));
  CHECK(symplectic_spectrum(t).values[1] == doctest::Approx(1.0));
}

TEST_CASE("symplectic form and transforms") {
  const Matrix omega = symplectic_form(2);
  CHECK(omega(0, 1) == 1.0);
  CHECK(omega(1, 0) == -1.0);
  CHECK(max_abs_diff(omega * omega, -Matrix::Identity(4, 4)) == 0.0);

  Matrix not_symplectic = Matrix::Identity(2, 2);
  not_symplectic(0, 0) = 2.0;
  CHECK_THROWS_AS(SymplecticTransform{not_symplectic}, InvalidInput);

  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const SymplecticTransform s = random_symplectic(3, rng);
    CHECK(s.symplectic_defect() < 1e-10);
    const SymplecticTransform id = s * s.inverse();
    CHECK(max_abs_diff(id.matrix(), Matrix::Identity(6, 6)) < 1e-9);
  }
}

TEST_CASE("vacuum and thermal spectra") {
  for (double v : symplectic_spectrum(CovMatrix::vacuum(3)).values) CHECK(v == doctest::Approx(1.0));
  const auto spec = symplectic_spectrum(tensor(CovMatrix::thermal(4.0), CovMatrix::thermal(2.0)));
  REQUIRE(spec.values.size() == 2);
  CHECK(spec.values[0] == doctest::Approx(2.0));
  CHECK(spec.values[1] == doctest::Approx(4.0));
}

TEST_CASE("nonphysical states are rejected, rounding is clamped") {
  const CovMatrix squeezed_vacuum_violation = CovMatrix::diagonal(std::vector<double>{0.5, 0.5});
  CHECK_FALSE(is_physical(squeezed_vacuum_violation));
  CHECK_THROWS_AS(symplectic_spectrum(squeezed_vacuum_violation), NonphysicalState);
  CHECK_THROWS_AS(validate_physical(squeezed_vacuum_violation), NonphysicalState);

  const CovMatrix almost = CovMatrix::diagonal(std::vector<double>{1.0 - 5e-7, 1.0 - 5e-7});
  CHECK(symplectic_spectrum(almost).values[0] == 1.0);
  CHECK_THROWS_AS(CovMatrix::thermal(0.5), InvalidInput);
  CHECK(raw_symplectic_eigenvalues(almost)[0] < 1.0);
}

TEST_CASE("property: spectrum is invariant under symplectic congruence") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 40; ++k) {
    const int n = 1 + k % 3;
    const CovMatrix cm = random_cm(n, rng);
    const auto before = symplectic_spectrum(cm).values;
    const auto after = symplectic_spectrum(apply_symplectic(cm, random_symplectic(n, rng))).values;
    for (int i = 0; i < n; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-8));
  }
}

TEST_CASE("property: two-mode closed form matches the general solver") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const CovMatrix cm = random_cm(2, rng);
    const auto [minus, plus] = symplectic_eigenvalues_two_mode(cm);
    const auto spec = symplectic_spectrum(cm).values;
    CHECK(minus == doctest::Approx(spec[0]).epsilon(1e-8));
    CHECK(plus == doctest::Approx(spec[1]).epsilon(1e-8));
  }
}

TEST_CASE("property: Williamson decomposition reconstructs the CM") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 40; ++k) {
    const int n = 1 + k % 3;
    const CovMatrix cm = random_cm(n, rng);
    const WilliamsonDecomposition w = williamson(cm);
    Matrix d = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) d(2 * i, 2 * i) = d(2 * i + 1, 2 * i + 1) = w.nu[i];
    CHECK(max_abs_diff(w.s * d * w.s.transpose(), cm.gamma()) < 1e-8 * cm.gamma().norm());
    CHECK(SymplecticTransform(w.s).symplectic_defect() < 1e-8);
  }
}

TEST_CASE("property: seralian is a local symplectic invariant") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const CovMatrix cm = random_cm(2, rng);
    const Eigen::Matrix2d la = rotation(0.3 * k) * squeezer(1.0 + 0.1 * k);
    const Eigen::Matrix2d lb = squeezer(0.7) * rotation(-0.2 * k);
    const CovMatrix moved = apply_symplectic(cm, SymplecticTransform::local_pair(la, lb));
    CHECK(seralian(moved) == doctest::Approx(seralian(cm)).epsilon(1e-9));
  }
}

TEST_CASE("property: standard form is reached by the reported local operations") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const CovMatrix cm = random_cm(2, rng);
    const StandardForm sf = standard_form(cm);
    CHECK(sf.c_plus >= std::abs(sf.c_minus) - 1e-12);
    const CovMatrix reached =
        apply_symplectic(cm, SymplecticTransform::local_pair(sf.local_a, sf.local_b));
    CHECK(max_abs_diff(reached.gamma(), sf.matrix().gamma()) < 1e-8 * cm.gamma().norm());
    CHECK(sf.a * sf.a == doctest::Approx(cm.block(0, 0).determinant()).epsilon(1e-9));
    CHECK(sf.c_plus * sf.c_minus == doctest::Approx(cm.block(0, 1).determinant()).epsilon(1e-8));
  }
}

TEST_CASE("standard form of a product state") {
  const Matrix g = tensor(apply_symplectic(CovMatrix::thermal(3.0), SymplecticTransform(squeezer(2.0))),
                          CovMatrix::thermal(1.5))
                       .gamma();
  const StandardForm sf = standard_form(CovMatrix(g));
  CHECK(sf.a == doctest::Approx(3.0));
  CHECK(sf.b == doctest::Approx(1.5));
  CHECK(sf.c_plus == doctest::Approx(0.0));
  CHECK(sf.c_minus == doctest::Approx(0.0));
}

TEST_CASE("partial transpose and PPT witness") {
  std::mt19937_64 rng(3);
  const CovMatrix cm = random_cm(2, rng);
  CHECK(max_abs_diff(partial_transpose(partial_transpose(cm, 1), 1).gamma(), cm.gamma()) == 0.0);
  CHECK(ppt_min_eig(CovMatrix::tmsv(2.0)) < -0.1);
  CHECK(ppt_min_eig(CovMatrix::vacuum(2)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ppt_min_eig(CovMatrix(measured_cm_gamma())) == doctest::Approx(0.844566).epsilon(1e-5));
}

TEST_CASE("property: coherent-state mixtures are PPT") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) CHECK(ppt_min_eig(random_separable_cm(2, rng)) >= -1e-9);
}

TEST_CASE("reduce, tensor and permute") {
  const CovMatrix a = CovMatrix::thermal(2.0);
  const CovMatrix b = CovMatrix::tmsv(3.0);
  const CovMatrix ab = tensor(a, b);
  CHECK(ab.n_modes() == 3);
  CHECK(max_abs_diff(reduce(ab, {1, 2}).gamma(), b.gamma()) == 0.0);
  const std::vector<int> order{1, 2, 0};
  const CovMatrix p = permute_modes(ab, order);
  CHECK(max_abs_diff(reduce(p, {2}).gamma(), a.gamma()) == 0.0);
  CHECK(max_abs_diff(reduce(p, {0, 1}).gamma(), b.gamma()) == 0.0);
}
