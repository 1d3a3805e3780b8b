#include <gtest/gtest.h>

#include <algorithm>
#include <iterator>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "ivprp/exact.hpp"
#include "ivprp/mip_model.hpp"
#include "support/model_enumerator.hpp"

using namespace ivprp;

namespace {

struct Setting {
  int n, days, pollsters, vehicles, capacity;
};

void PrintTo(const Setting& s, std::ostream* os) {
  *os << "n=" << s.n << " S=" << s.days << " E=" << s.pollsters << " K=" << s.vehicles << " Q=" << s.capacity;
}

Instance small_instance(const Setting& s) {
  Instance in = fixtures::uniform(s.n, 3, 2, 60, 2);
  in.t0 = Minutes::whole(5);
  in.t1 = Minutes::whole(50);
  in.num_days = s.days;
  in.num_pollsters = s.pollsters;
  in.num_vehicles = s.vehicles;
  in.capacity = s.capacity;
  return in;
}

struct Images {
  std::set<std::string> model, oracle;
  std::size_t points = 0;
  std::vector<std::string> problems;
};

Images compare(const Instance& inst) {
  Images out;
  const MipModel m = build_model(inst);
  model_enum::Enumerator e(m);
  out.points = e.run([&](const Assignment& a) {
    const Plan p = parse_solution(m, a);
    const auto rep = check_plan(inst, p);
    if (!rep.ok) out.problems.push_back("model point fails the checker: " + to_json(p).dump());
    out.model.insert(to_json(canonicalize_plan(inst, p)).dump());
  });
  for (const Plan& p : enumerate_feasible(inst)) {
    out.oracle.insert(to_json(p).dump());
    if (!row_violations(m, encode_plan(inst, p, true)).empty()) out.problems.push_back("oracle plan violates rows: " + to_json(p).dump());
  }
  return out;
}

class ModelEnumeration : public ::testing::TestWithParam<Setting> {};

TEST_P(ModelEnumeration, FeasiblePointsMatchCheckedPlans) {
  const Images im = compare(small_instance(GetParam()));
  EXPECT_GT(im.points, 0u);
  EXPECT_TRUE(im.problems.empty()) << im.problems.front();
  std::vector<std::string> only_model, only_oracle;
  std::set_difference(im.model.begin(), im.model.end(), im.oracle.begin(), im.oracle.end(), std::back_inserter(only_model));
  std::set_difference(im.oracle.begin(), im.oracle.end(), im.model.begin(), im.model.end(), std::back_inserter(only_oracle));
  EXPECT_TRUE(only_model.empty()) << only_model.size() << " plans only in the model, e.g. " << only_model.front();
  EXPECT_TRUE(only_oracle.empty()) << only_oracle.size() << " plans only in the oracle, e.g. " << only_oracle.front();
  EXPECT_EQ(im.model.size(), im.oracle.size());
}

INSTANTIATE_TEST_SUITE_P(Small, ModelEnumeration,
                         ::testing::Values(Setting{1, 1, 1, 1, 1}, Setting{2, 1, 2, 1, 2}, Setting{2, 2, 1, 2, 1}),
                         [](const ::testing::TestParamInfo<Setting>& i) {
                           const Setting& s = i.param;
                           return "n" + std::to_string(s.n) + "_S" + std::to_string(s.days) + "_E" + std::to_string(s.pollsters) +
                                  "_K" + std::to_string(s.vehicles) + "_Q" + std::to_string(s.capacity);
                         });

TEST(ModelEnumerator, RejectsRowsBeyondDifferences) {
  MipModel m;
  const int a = m.add_variable("a", VarKind::Continuous, 0, 10);
  const int b = m.add_variable("b", VarKind::Continuous, 0, 10);
  m.constraints.push_back({"sum", "sum", {{a, 1}, {b, 1}}, Sense::LessEq, 5});
  model_enum::Enumerator e(m);
  EXPECT_THROW(e.run([](const Assignment&) {}), std::runtime_error);
}

TEST(ModelEnumerator, CountsPointsOfAKnapsack) {
  MipModel m;
  for (int i = 0; i < 4; ++i) m.add_variable("x" + std::to_string(i), VarKind::Binary, 0, 1);
  m.constraints.push_back({"cap", "cap", {{0, 1}, {1, 1}, {2, 1}, {3, 1}}, Sense::LessEq, 2});
  model_enum::Enumerator e(m);
  EXPECT_EQ(e.run([](const Assignment&) {}), 11u);
}

}  // namespace
