#include <cmath>
#include <limits>

#include "doctest.h"
#include "sirsurv/analytics.hpp"
#include "sirsurv/error.hpp"
#include "sirsurv/ode_engine.hpp"

using namespace sirsurv;
using namespace sirsurv::analytics;

namespace {

ModelParams classic(double b, double c) { return {b, c, 0.0, 0.0, 0.0, 1.0}; }
ModelParams birth_death(double b, double c, double m, double l) { return {b, c, m, 0.0, l, 1.0}; }

}  // namespace

TEST_CASE("basic reproduction number") {
  CHECK(basic_reproduction_number(ModelVariant::Classic, classic(0.001, 0.9)) == doctest::Approx(0.001111).epsilon(1e-3));
  CHECK(basic_reproduction_number(ModelVariant::Classic, classic(0.3, 0.3)) == 1.0);
  CHECK(basic_reproduction_number(ModelVariant::Classic, classic(0.4, 0.15)) == doctest::Approx(0.4 / 0.15));

  // Counts: b is per contact pair, beta = b * n.
  const ModelParams counts{0.5 / 10000, 0.1, 0.0, 0.0, 0.0, 10000.0};
  CHECK(basic_reproduction_number(ModelVariant::Classic, counts) == doctest::Approx(5.0));

  const double l = 3.75 * 0.01 * 0.16 / 0.4;
  CHECK(l == doctest::Approx(0.015));
  CHECK(basic_reproduction_number(ModelVariant::BirthDeath, birth_death(0.4, 0.15, 0.01, 0.015)) ==
        doctest::Approx(3.75));

  const ModelParams ds13{0.4, 0.15, 0.01, 0.05, 0.0, 1.0};
  CHECK(basic_reproduction_number(ModelVariant::DeathSituations13, ds13) == doctest::Approx(0.4 / 0.2));
  CHECK(basic_reproduction_number(ModelVariant::DeathSituation2, ds13) == doctest::Approx(0.4 / 0.15));

  CHECK_THROWS_AS(basic_reproduction_number(ModelVariant::Classic, classic(0.4, 0.0)), UndefinedThresholdError);
  CHECK_THROWS_AS(basic_reproduction_number(ModelVariant::BirthDeath, birth_death(0.4, 0.15, 0.0, 0.015)),
                  UndefinedThresholdError);
}

TEST_CASE("effective reproduction number") {
  const ModelParams counts{0.5 / 10000, 0.1, 0.0, 0.0, 0.0, 10000.0};
  CHECK(effective_reproduction_number(counts, 9999.0, 10000.0) == doctest::Approx(4.9995).epsilon(1e-12));
  CHECK(effective_reproduction_number(counts, 10000.0, 10000.0) ==
        doctest::Approx(basic_reproduction_number(ModelVariant::Classic, counts)));
  CHECK(effective_reproduction_number(counts, 0.0, 10000.0) == 0.0);
  CHECK(effective_reproduction_number(classic(0.4, 0.15), 0.9, 1.0) == doctest::Approx(2.4));
}

TEST_CASE("max informed") {
  SUBCASE("large population limit") {
    const double n = 1e6;
    const double r0 = 3.0;
    const ModelParams p{r0 * 0.1 / n, 0.1, 0.0, 0.0, 0.0, n};
    const double expected = n - (n / r0) * (1.0 + std::log(r0));
    CHECK(max_informed(p, n - 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-5));
  }
  SUBCASE("peak at the start") {
    const auto p = classic(0.4, 0.2);
    CHECK(max_informed(p, 0.5, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(max_informed(p, 0.3, 0.1) == 0.1);
  }
  SUBCASE("Fig. 2 value") {
    // Closed form evaluated independently.
    CHECK(max_informed(classic(0.4, 0.15), 0.9, 0.1) == doctest::Approx(0.296699223492288).epsilon(1e-12));
  }
  SUBCASE("no recovery") { CHECK(max_informed(classic(0.4, 0.0), 0.9, 0.1) == doctest::Approx(1.0)); }
  SUBCASE("no transmission") { CHECK_THROWS_AS(max_informed(classic(0.0, 0.15), 0.9, 0.1), DomainError); }
}

TEST_CASE("susceptible floor") {
  CHECK(susceptible_floor(0.9, 0.0) == 0.9);
  CHECK(susceptible_floor(0.9, 2.4) == doctest::Approx(0.0816461579604713).epsilon(1e-12));
  CHECK(susceptible_floor(0.0, 2.4) == 0.0);
  CHECK(susceptible_floor(classic(0.4, 0.15), 0.9) == doctest::Approx(0.9 * std::exp(-0.4 / 0.15)));

  // Long-horizon s(infinity) for Fig. 2 is 0.0767346947192546 (scipy, rtol 1e-12).
  const auto x = ode::final_state(ode::integrate(ModelVariant::Classic, classic(0.4, 0.15), {0.9, 0.1, 0, 0}, 500.0));
  CHECK(x.s == doctest::Approx(0.0767346947192546).epsilon(1e-8));
  CHECK(x.s >= susceptible_floor(classic(0.4, 0.15), 0.9));
}

TEST_CASE("conserved quantity") {
  CHECK(conserved_quantity(classic(0.4, 0.0), 0.3, 0.2) == doctest::Approx(0.5));
  CHECK(conserved_quantity(classic(0.4, 0.15), 1.0, 0.0) == 1.0);
  CHECK(conserved_quantity(classic(0.1, 5.0), 1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(conserved_quantity(classic(0.4, 0.15), 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(conserved_quantity(classic(0.0, 0.15), 0.5, 0.1), DomainError);
}

TEST_CASE("endemic equilibrium") {
  SUBCASE("Fig. 8 parameters") {
    const auto eq = endemic_equilibrium(birth_death(0.4, 0.15, 0.01, 0.015));
    CHECK(eq.s == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(eq.i == doctest::Approx(0.06875).epsilon(1e-12));
    CHECK(eq.r == doctest::Approx(1.03125).epsilon(1e-12));
  }
  SUBCASE("threshold coincidence") {
    const double l = 0.01 * 0.16 / 0.4;
    const auto eq = endemic_equilibrium(birth_death(0.4, 0.15, 0.01, l));
    CHECK(eq.s == doctest::Approx(l / 0.01));
    CHECK(eq.i == 0.0);
    CHECK(eq.r == 0.0);
  }
  SUBCASE("below threshold") {
    const auto eq = endemic_equilibrium(birth_death(0.4, 0.15, 0.01, 0.002));
    CHECK(eq.s == doctest::Approx(0.2));
    CHECK(eq.i == 0.0);
  }
  SUBCASE("no births") {
    const auto eq = endemic_equilibrium(birth_death(0.4, 0.15, 0.01, 0.0));
    CHECK(eq.s == 0.0);
    CHECK(eq.i == 0.0);
    CHECK(eq.r == 0.0);
  }
  SUBCASE("no deaths") { CHECK_THROWS_AS(endemic_equilibrium(birth_death(0.4, 0.15, 0.0, 0.015)), DomainError); }
  SUBCASE("equilibrium is a fixed point of the vector field") {
    const auto p = birth_death(0.4, 0.15, 0.01, 0.015);
    const auto eq = endemic_equilibrium(p);
    const auto d = derivative(ModelVariant::BirthDeath, p, {eq.s, eq.i, eq.r, 0.0});
    CHECK(std::abs(d.ds) < 1e-15);
    CHECK(std::abs(d.di) < 1e-15);
    CHECK(std::abs(d.dr) < 1e-15);
  }
}

TEST_CASE("classify outcome") {
  const auto sub = classify_outcome(ModelVariant::Classic, classic(0.001, 0.9), 0.9, 0.1, 1.0);
  CHECK(sub.outcome == Outcome::Decay);
  REQUIRE(sub.i_max.has_value());
  CHECK(*sub.i_max == 0.1);

  const ModelParams counts{0.5 / 10000, 0.1, 0.0, 0.0, 0.0, 10000.0};
  const auto sup = classify_outcome(ModelVariant::Classic, counts, 9999.0, 1.0, 10000.0);
  CHECK(sup.outcome == Outcome::Epidemic);
  CHECK(sup.re == doctest::Approx(4.9995));

  const auto bd = classify_outcome(ModelVariant::BirthDeath, birth_death(0.4, 0.15, 0.01, 0.015), 0.9, 0.1, 1.0);
  CHECK(bd.outcome == Outcome::Endemic);
  CHECK(bd.r0 == doctest::Approx(3.75));
  REQUIRE(bd.equilibrium.has_value());
  CHECK(bd.equilibrium->i == doctest::Approx(0.06875));
  CHECK_FALSE(bd.i_max.has_value());

  const auto bd_low = classify_outcome(ModelVariant::BirthDeath, birth_death(0.4, 0.15, 0.01, 0.002), 0.9, 0.1, 1.0);
  CHECK(bd_low.outcome == Outcome::Decay);

  const auto edge = classify_outcome(ModelVariant::Classic, classic(0.5, 0.45), 0.9, 0.1, 1.0);
  CHECK(edge.re == doctest::Approx(1.0));
  CHECK(edge.outcome == Outcome::Decay);

  CHECK_THROWS_AS(classify_outcome(ModelVariant::Classic, classic(-0.5, 0.45), 0.9, 0.1, 1.0), ValidationError);
}

TEST_CASE("report json omits absent fields") {
  nlohmann::json j = classify_outcome(ModelVariant::Classic, classic(0.4, 0.15), 0.9, 0.1, 1.0);
  CHECK(j["outcome"] == "Epidemic");
  CHECK(j.contains("i_max"));
  CHECK(j.contains("s_floor"));
  CHECK_FALSE(j.contains("equilibrium"));

  nlohmann::json k = classify_outcome(ModelVariant::BirthDeath, birth_death(0.4, 0.15, 0.01, 0.015), 0.9, 0.1, 1.0);
  CHECK(k["outcome"] == "Endemic");
  CHECK(k["equilibrium"].size() == 3);
  CHECK_FALSE(k.contains("i_max"));
}

TEST_CASE("threshold, floor and peak hold on the b, c grid") {
  for (int bi = 1; bi <= 18; ++bi) {
    for (int ci = 1; ci <= 18; ++ci) {
      const auto p = classic(bi / 20.0, ci / 20.0);
      CAPTURE(p.b);
      CAPTURE(p.c);
      const auto rep = classify_outcome(ModelVariant::Classic, p, 0.9, 0.1, 1.0);
      const auto traj = ode::integrate(ModelVariant::Classic, p, {0.9, 0.1, 0.0, 0.0}, 200.0, 0.05);
      const auto peak = ode::peak_informed(traj);
      if (rep.outcome == Outcome::Decay) {
        CHECK(peak.t == 0.0);
      } else {
        CHECK(peak.t > 0.0);
        CHECK(peak.t < 200.0);
      }
      CHECK(ode::final_state(traj).s >= *rep.s_floor - 1e-9);
      if (0.9 >= p.c / p.b) CHECK(std::abs(*rep.i_max - peak.i) < 1e-3);
    }
  }
}

TEST_CASE("birth-death run settles on the equilibrium") {
  const auto p = birth_death(0.4, 0.15, 0.01, 0.015);
  const auto x = ode::final_state(ode::integrate(ModelVariant::BirthDeath, p, {0.9, 0.1, 0.0, 0.0}, 2000.0, 0.05));
  const auto eq = endemic_equilibrium(p);
  CHECK(x.s == doctest::Approx(eq.s).epsilon(0.01));
  CHECK(x.i == doctest::Approx(eq.i).epsilon(0.01));
  CHECK(x.r == doctest::Approx(eq.r).epsilon(0.01));
}
