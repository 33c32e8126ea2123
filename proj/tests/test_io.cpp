#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "pulearn/errors.hpp"
#include "pulearn/experiments.hpp"
#include "pulearn/io.hpp"
#include "test_support.hpp"

using namespace pulearn;

namespace {

ObservationSample read(const std::string& text) {
  std::istringstream is(text);
  return read_sample(is);
}

}  // namespace

TEST_CASE("sample CSV round trip is exact") {
  ObservationSample s;
  s.x = testing::gaussian(20, 4, 1);
  s.f = testing::gaussian(20, 2, 2);
  s.weights = Vector::Constant(20, 1.0 / 3.0);
  std::ostringstream os;
  write_sample(os, s);
  CHECK(os.str().rfind("weight,x0,x1,x2,x3,f0,f1\n", 0) == 0);
  const ObservationSample t = read(os.str());
  CHECK(t.x == s.x);
  CHECK(t.f == s.f);
  CHECK(t.weights == s.weights);
}

TEST_CASE("malformed samples") {
  CHECK_THROWS_AS(read(""), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n"), InputError);
  CHECK_THROWS_AS(read("w,x0,f0\n1,2,3\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,x2,f0\n1,2,3,4\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n1,2\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n1,2,abc\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n1,2,nan\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n0,2,3\n"), InputError);
  CHECK_THROWS_AS(read("weight,x0,f0\n-1,2,3\n"), InputError);
  CHECK(read("weight,x0,f0\r\n1,2,3\r\n\n").size() == 1);
}

TEST_CASE("model reload reproduces the fidelity") {
  const Matrix u0 = euler_rotation(0.1, 0.4, 0.7);
  const ObservationSample s = generate_trajectory(
      u0, Eigen::Vector3d(0.6, 0.0, 0.8), 100, 3, true);
  SolverConfig cfg;
  cfg.num_runs = 1;
  const Recovery r = recover_dynamics(s, Channel::gram, cfg);
  ModelFile m;
  m.d = 3;
  m.n = 3;
  m.u = r.u;
  m.fidelity = channel_fidelity(s, Channel::gram, r.u);
  m.converged = r.report.converged;
  m.iterations = static_cast<int>(r.report.iterations.size());
  m.seed = 3;
  m.history = r.report.iterations;
  const std::string text = model_to_json(m);
  const ModelFile back = model_from_json(text);
  CHECK(back.u == m.u);
  CHECK(back.history.size() == m.history.size());
  CHECK(back.history.back().penalty == m.history.back().penalty);
  const double f = channel_fidelity(s, back.channel, back.u);
  CHECK(std::abs(f - m.fidelity) <= 1e-12 * std::max(1.0, std::abs(m.fidelity)));
  CHECK(model_to_json(back) == text);
}

TEST_CASE("malformed models") {
  CHECK_THROWS_AS(model_from_json("{"), InputError);
  CHECK_THROWS_AS(model_from_json("{\"D\": 1}"), InputError);
  CHECK_THROWS_AS(
      model_from_json(R"({"D":2,"n":2,"channel":"gram","u":[[1,0]],"fidelity":1,)"
                      R"("converged":true,"iterations":1,"seed":0,"history":[]})"),
      InputError);
}

TEST_CASE("full precision formatting") {
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
