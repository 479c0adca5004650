#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cafe/errors.hpp"
#include "cafe/optim.hpp"
#include "cafe/rng.hpp"
#include "oracles.hpp"

using namespace cafe;

namespace {

Vec random_vec(size_t n, Rng& rng, double scale = 1.0) {
  Vec v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("zero momentum reduces to plain gradient descent") {
  Vec params{1.0, 2.0, 3.0};
  LocalMomentum opt(3, 0.0, 0.1);
  opt.round_start();
  Vec grad{0.5, -1.0, 2.0};
  opt.step(params, grad);
  CHECK(params[0] == doctest::Approx(1.0 - 0.1 * 0.5));
  CHECK(params[1] == doctest::Approx(2.0 + 0.1 * 1.0));
  CHECK(params[2] == doctest::Approx(3.0 - 0.1 * 2.0));
}

TEST_CASE("constant unit gradient: buffer walks 1 then 1.9") {
  Vec params{0.0};
  LocalMomentum opt(1, 0.9, 0.01);
  opt.round_start();
  Vec grad{1.0};
  opt.step(params, grad);
  CHECK(opt.buffer()[0] == doctest::Approx(1.0));
  opt.step(params, grad);
  CHECK(opt.buffer()[0] == doctest::Approx(1.9));
}

TEST_CASE("round_start clears the buffer and the round sums") {
  Vec params{0.0, 0.0};
  LocalMomentum opt(2, 0.5, 0.1);
  opt.round_start();
  Vec grad{1.0, -1.0};
  opt.step(params, grad);
  CHECK(opt.buffer()[0] != 0.0);
  opt.round_start();
  CHECK(opt.buffer()[0] == 0.0);
  CHECK(opt.buffer_round_sum()[0] == 0.0);
  CHECK(opt.steps_this_round() == 0);
}

TEST_CASE("ten random gradients: iterative client updates equal the closed form") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const size_t dim = 6;
    const double decay = rng.uniform() * 0.95;
    const double step = 0.05;
    Vec start = random_vec(dim, rng);

    std::vector<Vec> grads;
    for (int j = 0; j < 10; ++j) grads.push_back(random_vec(dim, rng));

    Vec params = start;
    LocalMomentum opt(dim, decay, step);
    opt.round_start();
    for (const Vec& g : grads) opt.step(params, g);

    Vec displacement = expand_local(grads, decay, step, 10);
    Vec expected = start;
    axpy(1.0, displacement, expected);
    CHECK(oracles::relative_error(params, expected) < 1e-12);
  }
}

TEST_CASE("single-step and zero-momentum reductions of the local expansion") {
  Rng rng(32);
  Vec g1 = random_vec(4, rng);
  Vec g2 = random_vec(4, rng);
  std::vector<Vec> grads{g1, g2};

  Vec one = expand_local(grads, 0.7, 0.1, 1);
  for (size_t i = 0; i < 4; ++i) CHECK(one[i] == doctest::Approx(-0.1 * g1[i]));

  Vec sgd = expand_local(grads, 0.0, 0.1, 2);
  for (size_t i = 0; i < 4; ++i) CHECK(sgd[i] == doctest::Approx(-0.1 * (g1[i] + g2[i])));
}

TEST_CASE("server optimizer: reductions and constancy") {
  Vec params{1.0, -1.0};
  GlobalMomentum opt(2, 0.0, 0.05);
  Vec agg{2.0, 4.0};
  opt.step(params, agg);
  CHECK(params[0] == doctest::Approx(1.0 - 0.05 * 2.0));
  CHECK(params[1] == doctest::Approx(-1.0 - 0.05 * 4.0));

  GlobalMomentum opt2(2, 0.9, 0.05);
  Vec fixed{3.0, 3.0};
  Vec zero{0.0, 0.0};
  for (int r = 0; r < 5; ++r) opt2.step(fixed, zero);
  CHECK(fixed[0] == doctest::Approx(3.0));
  CHECK(fixed[1] == doctest::Approx(3.0));
}

TEST_CASE("five random rounds: iterative server trajectory equals both expansions") {
  Rng rng(33);
  const size_t dim = 5;
  const double decay = 0.8;
  const double step = 0.1;

  std::vector<RoundAggregate> history;
  for (int r = 0; r < 5; ++r) {
    RoundAggregate round;
    int parts = 1 + rng.uniform_int(3);
    for (int k = 0; k < parts; ++k)
      round.parts.push_back({k, 0.2 + rng.uniform(), random_vec(dim, rng)});
    history.push_back(round);
  }

  Vec start = random_vec(dim, rng);
  Vec params = start;
  GlobalMomentum opt(dim, decay, step);
  for (const auto& round : history) opt.step(params, aggregate_of(round));

  Vec buffer = expand_global(history, decay, 5);
  CHECK(oracles::relative_error(buffer, Vec(opt.buffer())) < 1e-12);

  Vec displacement = expand_global_displacement(history, decay, step, 5);
  Vec expected = start;
  axpy(1.0, displacement, expected);
  CHECK(oracles::relative_error(params, expected) < 1e-12);
}

TEST_CASE("one-round buffer expansion is the weighted first update") {
  Rng rng(34);
  RoundAggregate round;
  round.parts.push_back({0, 0.3, random_vec(4, rng)});
  std::vector<RoundAggregate> history{round};
  Vec buffer = expand_global(history, 0.9, 1);
  for (size_t i = 0; i < 4; ++i)
    CHECK(buffer[i] == doctest::Approx(0.3 * round.parts[0].update[i]));
}

TEST_CASE("balanced full participation matches the symmetric per-client form") {
  Rng rng(35);
  const int clients = 4;
  const int rounds = 6;
  const size_t dim = 3;
  const double decay = 0.6;

  std::vector<RoundAggregate> history;
  std::vector<std::vector<Vec>> updates(clients);
  for (int r = 0; r < rounds; ++r) {
    RoundAggregate round;
    for (int k = 0; k < clients; ++k) {
      Vec u = random_vec(dim, rng);
      updates[static_cast<size_t>(k)].push_back(u);
      round.parts.push_back({k, 1.0 / clients, u});
    }
    history.push_back(round);
  }

  // buffer after r rounds: per client, sum_j decay^(r-j) u_j / K
  Vec expected(dim, 0.0);
  for (int k = 0; k < clients; ++k)
    for (int j = 1; j <= rounds; ++j)
      axpy(std::pow(decay, rounds - j) / clients, updates[static_cast<size_t>(k)][static_cast<size_t>(j - 1)],
           expected);
  Vec buffer = expand_global(history, decay, rounds);
  CHECK(oracles::relative_error(buffer, expected) < 1e-12);
}

TEST_CASE("per-client contributions sum to the total and rank by participation") {
  Rng rng(36);
  const size_t dim = 4;
  const double decay = 0.7;
  const double step = 0.1;
  const int rounds = 6;

  // three clients with unequal participation masks; all updates share one
  // unit direction so contribution norms count participations directly
  std::vector<std::vector<int>> masks = {{1, 1, 1, 1, 1, 1}, {1, 0, 1, 0, 1, 0}, {0, 0, 0, 1, 0, 0}};
  Vec direction = random_vec(dim, rng);
  double dn = norm(direction);
  for (double& v : direction) v /= dn;

  std::vector<RoundAggregate> history;
  for (int r = 0; r < rounds; ++r) {
    RoundAggregate round;
    for (int k = 0; k < 3; ++k)
      if (masks[static_cast<size_t>(k)][static_cast<size_t>(r)]) round.parts.push_back({k, 0.5, direction});
    history.push_back(round);
  }

  Vec params(dim, 1.0);
  Vec start = params;
  GlobalMomentum opt(dim, decay, step);
  for (const auto& round : history) opt.step(params, aggregate_of(round));

  Vec displacement = expand_global_displacement(history, decay, step, rounds);
  Vec expected = start;
  axpy(1.0, displacement, expected);
  CHECK(oracles::relative_error(params, expected) < 1e-8);

  auto contributions = expand_global_displacement_by_client(history, decay, step, rounds);
  Vec total(dim, 0.0);
  for (const auto& [client, v] : contributions) axpy(1.0, v, total);
  CHECK(oracles::relative_error(total, displacement) < 1e-12);

  CHECK(norm(contributions.at(0)) > norm(contributions.at(1)));
  CHECK(norm(contributions.at(1)) > norm(contributions.at(2)));

  auto buffer_split = expand_global_by_client(history, decay, rounds);
  Vec buffer_total(dim, 0.0);
  for (const auto& [client, v] : buffer_split) axpy(1.0, v, buffer_total);
  CHECK(oracles::relative_error(buffer_total, expand_global(history, decay, rounds)) < 1e-12);
}

TEST_CASE("degenerate decay and non-finite gradients are rejected") {
  CHECK_THROWS_AS(LocalMomentum(3, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(GlobalMomentum(3, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(expand_local({Vec{1.0}}, 1.0, 0.1, 1), ConfigError);

  LocalMomentum opt(2, 0.5, 0.1);
  opt.round_start();
  Vec params{0.0, 0.0};
  Vec bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(opt.step(params, bad), NumericError);

  GlobalMomentum gopt(2, 0.5, 0.1);
  Vec inf{std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_AS(gopt.step(params, inf), NumericError);
}

TEST_CASE("gradient history is recorded only in oracle mode") {
  Vec params{0.0};
  LocalMomentum plain(1, 0.5, 0.1, false);
  plain.round_start();
  Vec g{1.0};
  plain.step(params, g);
  CHECK(plain.history().empty());

  LocalMomentum recording(1, 0.5, 0.1, true);
  recording.round_start();
  recording.step(params, g);
  CHECK(recording.history().size() == 1);
}
