#include <doctest.h>

#include <cmath>

#include "crebound/equilibration.hpp"
#include "crebound/mesh_gen.hpp"
#include "crebound/quadrature.hpp"

using namespace crebound;

namespace {

ElasticModel ps(double E = 1.0, double nu = 0.3) {
  return {E, nu, PlaneAssumption::plane_stress};
}

Vec2 poly_displacement(const Vec2& p) { return {p.x * p.x, p.x * p.y}; }

Problem poly_problem(std::shared_ptr<const TriMesh> mesh, const ElasticModel& m) {
  Problem p;
  p.mesh = std::move(mesh);
  p.model = m;
  for (const char* tag : {"left", "right", "bottom", "top"})
    p.loads.dirichlet[tag] = poly_displacement;
  const Eigen::Matrix3d K = hooke_voigt(m);
  p.loads.body_force[""] = {-(2.0 * K(0, 0) + K(0, 1) + K(2, 2)), 0.0};
  return p;
}

Problem uniaxial_problem(std::shared_ptr<const TriMesh> mesh, const ElasticModel& m) {
  Problem p;
  p.mesh = std::move(mesh);
  p.model = m;
  auto field = [](const Vec2& q) { return Vec2{q.x, 0.0}; };
  for (const char* tag : {"left", "right", "bottom", "top"}) p.loads.dirichlet[tag] = field;
  return p;
}

}  // namespace

TEST_CASE("patch test: tractions equal sigma n exactly") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(3));
  const Problem p = uniaxial_problem(mesh, ps());
  const FemSolution sol = solve(p);
  const EdgeTractions tr = equilibrate_tractions(p, sol);
  const Eigen::Vector3d s = sol.stress[0];
  for (size_t i = 0; i < tr.topology.edges.size(); ++i) {
    const auto& ed = tr.topology.edges[i];
    if (ed.boundary_index >= 0) continue;  // Dirichlet-boundary edges are free
    const Vec2 expected{s(0) * ed.normal.x + s(2) * ed.normal.y,
                        s(2) * ed.normal.x + s(1) * ed.normal.y};
    CHECK(norm(tr.at_a[i] - expected) < 1e-10);
    CHECK(norm(tr.at_b[i] - expected) < 1e-10);
  }
}

TEST_CASE("zero problem gives zero tractions") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(2));
  Problem p;
  p.mesh = mesh;
  p.model = ps();
  p.loads.dirichlet["left"] = LoadSet::constant({0, 0});
  const FemSolution sol = solve(p);
  const EdgeTractions tr = equilibrate_tractions(p, sol);
  for (size_t i = 0; i < tr.topology.edges.size(); ++i) {
    CHECK(norm(tr.at_a[i]) < 1e-13);
    CHECK(norm(tr.at_b[i]) < 1e-13);
  }
}

TEST_CASE("manufactured problem: per-element force and moment balance") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(4));
  const Problem p = poly_problem(mesh, ps());
  const FemSolution sol = solve(p);
  const EdgeTractions tr = equilibrate_tractions(p, sol);
  for (int e = 0; e < mesh->num_elements(); ++e) {
    const auto et = tr.element_tractions(*mesh, e);
    CHECK(element_equilibrium_residual(*mesh, e, et, p.body_force(e)) < 1e-10);
  }
}

TEST_CASE("non-Galerkin input rejected") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(3));
  const Problem p = poly_problem(mesh, ps());
  FemSolution sol = solve(p);
  sol.stress[3] += Eigen::Vector3d(0.5, 0.0, 0.0);  // break Galerkin orthogonality
  CHECK_THROWS_AS(equilibrate_tractions(p, sol), NumericalError);
}

TEST_CASE("local solve recovers a uniform stress state") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(2));
  const Eigen::Vector3d sigma(1.3, -0.4, 0.2);
  const int e = 3;
  const auto t = mesh->element_triangle(e);
  std::array<std::pair<Vec2, Vec2>, 3> tr;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = t[(k + 1) % 3] - t[k];
    Vec2 n = rot90(d) * (-1.0 / norm(d));
    const Vec2 f{sigma(0) * n.x + sigma(2) * n.y, sigma(2) * n.x + sigma(1) * n.y};
    tr[k] = {f, f};
  }
  const ElementStress es = local_neumann_solve(*mesh, ps(), e, tr, {0, 0});
  for (const Vec2 x : {mesh->centroid(e), t[0] + (t[1] - t[0]) * 0.25}) {
    const Eigen::Vector3d s = es.stress_voigt(x);
    CHECK((s - sigma).norm() < 1e-10);
  }
}

TEST_CASE("local solve rejects non-equilibrated data") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(2));
  std::array<std::pair<Vec2, Vec2>, 3> tr{};
  tr[0] = {Vec2{1, 0}, Vec2{1, 0}};  // unbalanced pull on one edge
  CHECK_THROWS_AS(local_neumann_solve(*mesh, ps(), 0, tr, {0, 0}), std::invalid_argument);
}

TEST_CASE("local solve satisfies the weak form in a degree-4 space") {
  // random-ish equilibrated tractions: take them from a manufactured solve
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(3));
  const Problem p = poly_problem(mesh, ps());
  const FemSolution sol = solve(p);
  const EdgeTractions tr = equilibrate_tractions(p, sol);
  const int e = 7;
  const auto et = tr.element_tractions(*mesh, e);
  const Vec2 f = p.body_force(e);
  const ElementStress es = local_neumann_solve(*mesh, ps(), e, et, f);

  // residual int sigma : eps(v) - int t.v - int f.v for v = monomial fields of
  // degree <= 4 (P4 displacement test space)
  const auto t = mesh->element_triangle(e);
  double max_res = 0.0, scale = 0.0;
  for (int deg = 1; deg <= 4; ++deg)
    for (int i = 0; i + 0 <= deg; ++i) {
      const int j = deg - i;
      for (int comp = 0; comp < 2; ++comp) {
        auto v = [&](const Vec2& x) {
          const double m = std::pow(x.x, i) * std::pow(x.y, j);
          return comp == 0 ? Vec2{m, 0.0} : Vec2{0.0, m};
        };
        auto grad = [&](const Vec2& x) {
          const double gx = i > 0 ? i * std::pow(x.x, i - 1) * std::pow(x.y, j) : 0.0;
          const double gy = j > 0 ? j * std::pow(x.x, i) * std::pow(x.y, j - 1) : 0.0;
          return Vec2{gx, gy};
        };
        double res = 0.0;
        // volume terms, per subtriangle for exactness
        const Vec2 g = (t[0] + t[1] + t[2]) / 3.0;
        const std::array<Triangle, 3> subs = {Triangle{t[0], t[1], g}, Triangle{t[1], t[2], g},
                                              Triangle{t[2], t[0], g}};
        for (const auto& st : subs)
          res += integrate_triangle(st, 8, [&](const Vec2& x) {
            const Eigen::Vector3d s = es.stress_voigt(x);
            const Vec2 gr = grad(x);
            Eigen::Vector3d eps;
            if (comp == 0)
              eps << gr.x, 0.0, gr.y;
            else
              eps << 0.0, gr.y, gr.x;
            const Vec2 vv = v(x);
            return s.dot(eps) - f.x * vv.x - f.y * vv.y;
          });
        // edge work
        const GaussRule& gl = gauss_legendre(6);
        for (int k = 0; k < 3; ++k) {
          const Vec2 a = t[k], b = t[(k + 1) % 3];
          const double len = norm(b - a);
          for (size_t q = 0; q < gl.x.size(); ++q) {
            const double tt = 0.5 * (gl.x[q] + 1.0);
            const Vec2 x = a + (b - a) * tt;
            const Vec2 trac = et[k].first * (1 - tt) + et[k].second * tt;
            const Vec2 vv = v(x);
            res -= 0.5 * len * gl.w[q] * dot(trac, vv);
          }
        }
        max_res = std::max(max_res, std::abs(res));
        scale = std::max(scale, 1.0);
      }
    }
  CHECK(max_res / scale < 1e-10);
}

TEST_CASE("build_admissible on the patch test has zero CRE") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(3));
  const Problem p = uniaxial_problem(mesh, ps());
  const FemSolution sol = solve(p);
  const AdmissibleStress adm = build_admissible(p, sol);
  CHECK(adm.e_cre() < 1e-12);
  CHECK(verify_admissibility(p, adm).pass(1e-9));
}

TEST_CASE("admissibility of the manufactured problem") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(5));
  const Problem p = poly_problem(mesh, ps());
  const FemSolution sol = solve(p);
  const AdmissibleStress adm = build_admissible(p, sol);

  SUBCASE("verify passes at 1e-9") {
    const AdmissibilityReport rep = verify_admissibility(p, adm);
    CAPTURE(rep.max_equilibrium_residual);
    CAPTURE(rep.max_traction_jump);
    CAPTURE(rep.max_neumann_mismatch);
    CHECK(rep.pass(1e-9));
  }
  SUBCASE("weak residual against P1 test fields vanishes") {
    CHECK(admissible_weak_residual(p, adm) < 1e-10);
  }
  SUBCASE("fault injection is caught and localized") {
    AdmissibleStress broken = adm;
    const int victim = 11;
    broken.stress[victim].add_constant(Eigen::Vector3d(1.3e-3, -0.7e-3, 0.4e-3));
    const AdmissibilityReport rep = verify_admissibility(p, broken);
    CHECK_FALSE(rep.pass(1e-9));
    CHECK(rep.worst_element == victim);
  }
  SUBCASE("prager-synge: overkill error below e_cre") {
    auto fine_mesh = std::make_shared<TriMesh>(refine_uniform(*mesh, 2));
    const FemSolution fine = solve(poly_problem(fine_mesh, ps()));
    const double err = energy_norm_of_difference(fine, sol);
    const double ecre = adm.e_cre();
    CHECK(err <= ecre * (1.0 + 1e-8));
    CHECK(ecre > 0.0);
  }
}

TEST_CASE("e_cre decreases under uniform refinement") {
  std::vector<double> ecre;
  for (int n : {3, 6, 12}) {
    auto mesh = std::make_shared<TriMesh>(unit_square_mesh(n));
    const Problem p = poly_problem(mesh, ps());
    const FemSolution sol = solve(p);
    ecre.push_back(build_admissible(p, sol).e_cre());
  }
  CHECK(ecre[1] < ecre[0]);
  CHECK(ecre[2] < ecre[1]);
  // P1 rate
  CHECK(ecre[0] / ecre[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(ecre[1] / ecre[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("zero problem is admissible with zero stress") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(2));
  Problem p;
  p.mesh = mesh;
  p.model = ps();
  p.loads.dirichlet["left"] = LoadSet::constant({0, 0});
  const FemSolution sol = solve(p);
  const AdmissibleStress adm = build_admissible(p, sol);
  CHECK(adm.e_cre() < 1e-14);
  CHECK(verify_admissibility(p, adm).pass(1e-9));
}

TEST_CASE("adjoint problem with prestress extractor is admissible") {
  auto mesh = std::make_shared<TriMesh>(unit_square_mesh(4));
  Problem adj;
  adj.mesh = mesh;
  adj.model = ps();
  for (const char* tag : {"left", "right", "bottom", "top"})
    adj.loads.dirichlet[tag] = LoadSet::constant({0, 0});
  // mean-stress extractor over one element
  adj.loads.prestress.assign(mesh->num_elements(), Eigen::Vector3d::Zero());
  const int target = 9;
  adj.loads.prestress[target] =
      hooke_voigt(adj.model) * Eigen::Vector3d(1.0 / mesh->element_area(target), 0.0, 0.0);
  const FemSolution sol = solve(adj);
  const AdmissibleStress adm = build_admissible(adj, sol);
  const AdmissibilityReport rep = verify_admissibility(adj, adm);
  CAPTURE(rep.max_equilibrium_residual);
  CAPTURE(rep.max_traction_jump);
  CHECK(rep.pass(1e-9));
  CHECK(admissible_weak_residual(adj, adm) < 1e-10);
  CHECK(adm.e_cre() > 0.0);
}
