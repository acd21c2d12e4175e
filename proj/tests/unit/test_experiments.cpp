#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "arakelab/errors.hpp"
#include "arakelab/experiments.hpp"
#include "helpers.hpp"

using namespace arakelab;

namespace {

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("k ranges") {
    CHECK(KRange{1, 5, 2}.values() == std::vector<long>{1, 3, 5});
    CHECK_THROWS_AS(KRange({5, 1, 1}).values(), InvalidArgument);
    CHECK_THROWS_AS(KRange({1, 5, 0}).values(), InvalidArgument);
    CHECK(testing::close(volume_normalization(2, 5), Real(2) / Real(25), Real("1e-35")));
  }

  TEST_CASE("Toeplitz limit for x0+x1 has a closed form") {
    const auto f = parse_poly("x0+x1");
    const auto r = szego_experiment(f, {1, 40, 1}, SzegoMode::Exact);
    REQUIRE(r.points.size() == 40);
    for (const auto& p : r.points) {
      CHECK(testing::close(p.value, log(Real(p.k + 2)) / Real(p.k + 1), Real("1e-35")));
    }
    CHECK(abs(r.target) < Real("1e-8"));
    REQUIRE(r.extrapolated);
  }

  TEST_CASE("constant polynomial gives a constant sequence") {
    const auto r = szego_experiment(parse_poly("2*x0", 1), {1, 6, 1}, SzegoMode::Auto);
    for (const auto& p : r.points) CHECK(testing::close(p.value, log(Real(4)), Real("1e-35")));
    CHECK(testing::close(r.target, Real(2) * log(Real(2)), Real("1e-20")));
  }

  TEST_CASE("x0+x1+x2 Toeplitz determinants") {
    const auto f = parse_poly("x0+x1+x2");
    const auto r = szego_experiment(f, {1, 6, 1}, SzegoMode::Exact);
    const char* expected[] = {"0.9985774245179969978117412", "0.936128516277761882210577",
                              "0.8933400396056303916518653", "0.8620756715356470841819145",
                              "0.8381501752624056402366976", "0.8191991046525257068344546"};
    REQUIRE(r.points.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(testing::close(r.points[i].value, expected[i], 1e-24));
    for (std::size_t i = 1; i < 6; ++i) CHECK(r.points[i].value < r.points[i - 1].value);
    CHECK(testing::close(r.target, "0.646131894438901028187273", 1e-5));
  }

  TEST_CASE("exact and float determinants agree") {
    const auto f = parse_poly("x0^2+x0*x1-2*x1*x2");
    const auto ex = szego_experiment(f, {1, 8, 1}, SzegoMode::Exact);
    const auto fl = szego_experiment(f, {1, 8, 1}, SzegoMode::Float);
    REQUIRE(ex.points.size() == fl.points.size());
    for (std::size_t i = 0; i < ex.points.size(); ++i) {
      const Real diff = abs(ex.points[i].value - fl.points[i].value);
      CHECK(diff <= ldexp(abs(ex.points[i].value), -60));
      CHECK(fl.points[i].err <= ldexp(abs(fl.points[i].value), -60));
    }
    CHECK(testing::close(ex.target, Real(2) * log(Real(2)), Real("1e-20")));
  }

  TEST_CASE("volume reports for x0+x1") {
    const auto f = parse_poly("x0+x1");
    const auto v = volume_experiment(f, {1, 16, 1});
    REQUIRE(v.h0.points.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) {
      const long k = v.h0.points[i].k;
      long root = 0;
      while ((root + 1) * (root + 1) <= k + 1) ++root;
      CHECK(testing::close(v.h0.points[i].value, log(Real(2 * root + 1)) / Real(k), Real("1e-35")));
      CHECK(testing::close(v.degree.points[i].value, log(Real(k + 1)) / Real(2 * k), Real("1e-35")));
      if (k >= 3) CHECK(v.h1.points[i].value == 0);
    }
    CHECK(testing::close(v.h0.points[7].value, "0.24323877", 1e-8));
    CHECK_FALSE(v.h0.trend_only);
    CHECK(abs(v.h1.target) == 0);
  }

  TEST_CASE("volume report for x0+x1+x2 is trend-only") {
    const auto v = volume_experiment(parse_poly("x0+x1+x2"), {5, 5, 1});
    REQUIRE(v.degree.points.size() == 1);
    CHECK(testing::close(v.degree.points[0].value, "0.5172454029213882505", 1e-18));
    CHECK(v.degree.trend_only);
    CHECK(testing::close(v.degree.target, "0.323065947219450514", 1e-5));
  }

  TEST_CASE("cap exhaustion keeps the degree report") {
    ExperimentOptions o;
    o.cap = 5;
    const auto v = volume_experiment(parse_poly("x0+x1+x2"), {4, 5, 1}, o);
    CHECK(v.degree.points.size() == 2);
    CHECK(v.h0.points.size() < 2);
    CHECK_FALSE(v.h0.notes.empty());
  }

  TEST_CASE("h1 kernel bounds") {
    const auto a = h1_lemma_experiment(parse_poly("x0+x1"), {1, 12, 1});
    CHECK(a.bounds_hold);
    CHECK(a.report.points.size() == 12);
    const auto b = h1_lemma_experiment(parse_poly("x0+x1+x2"), {1, 4, 1});
    CHECK(b.bounds_hold);
    const auto c = h1_lemma_experiment(parse_poly("x0", 2), {1, 4, 1});
    CHECK(c.bounds_hold);
  }

  TEST_CASE("Stirling bracket") {
    const auto r11 = stirling_experiment(1, 1, {20, 200, 180});
    CHECK(testing::close(r11.points[0].value, "-0.03076114802835129689735904", 1e-25));
    CHECK(testing::close(r11.points[1].value, "-0.008669788483942808828741454", 1e-25));
    const auto r100 = stirling_experiment(1, 1, {100, 100, 1});
    CHECK(testing::close(r100.points[0].value, "-0.0139109693230420920874936", 1e-25));
    const auto r21 = stirling_experiment(2, 1, {20, 200, 180});
    CHECK(testing::close(r21.points[0].value, "-0.09350707145765383995592242", 1e-25));
    CHECK(testing::close(r21.points[1].value, "-0.02029002275465031303573854", 1e-25));
    const auto r22 = stirling_experiment(2, 2, {20, 200, 180});
    CHECK(testing::close(r22.points[0].value, "-0.1801325499424651721354263", 1e-25));
    CHECK(testing::close(r22.points[1].value, "-0.04045416355218077371988055", 1e-25));
    for (const auto& p : stirling_experiment(2, 0, {1, 10, 1}).points) CHECK(p.value == 0);
    CHECK_THROWS_AS(stirling_experiment(1, 3, {1, 5, 1}), InvalidArgument);
  }

  TEST_CASE("metric family") {
    const auto f = parse_poly("x0+x1+x2");
    const auto m = metric_family_experiment(f, 3, {1, 2, 3, 4, 6});
    CHECK(m.proportionality_holds);
    REQUIRE(m.report.points.size() == 5);
    const auto& p2 = m.report.points[1];
    CHECK(p2.k == 2);
    CHECK(p2.extra.at("scale") == "1/27");
    CHECK(m.report.points[4].extra.at("scale") == "1/3");
    CHECK(m.report.points[3].extra.at("proportional") == "n/a");
  }

  TEST_CASE("Riemann-Roch discrepancy") {
    const auto f = parse_poly("x0+x1");
    const auto r = rr_discrepancy_experiment(f, {8, 64, 56});
    CHECK(testing::close(r.points[0].value, log(Real(7) / Real(3)) / Real(8), Real("1e-35")));
    CHECK(r.points[1].value < r.points[0].value);
    for (std::size_t n = 1; n <= 6; ++n) CHECK(invariants(EuclideanLattice::standard(n)).rr_discrepancy == 0);
  }

  TEST_CASE("Richardson extrapolation") {
    std::vector<ConvergencePoint> pts(2);
    for (int i = 0; i < 2; ++i) {
      pts[static_cast<std::size_t>(i)].k = 10 * (i + 1);
      const Real k(10 * (i + 1));
      pts[static_cast<std::size_t>(i)].value = Real("0.5") + Real(3) * log(k) / k;
    }
    const auto t = richardson_log_over_k(pts);
    REQUIRE(t);
    CHECK(testing::close(*t, Real("0.5"), Real("1e-30")));
    CHECK_FALSE(richardson_log_over_k({pts[0]}));
  }

  TEST_CASE("report serialization") {
    const auto r = szego_experiment(parse_poly("x0+x1"), {1, 5, 1}, SzegoMode::Exact);
    const std::string csv = report_to_csv(r);
    CHECK(csv.rfind("k,value,target,err,runtime_ms\n", 0) == 0);
    CHECK(count_lines(csv) == 6);
    CHECK(csv.find(",NA\n") != std::string::npos);
    CHECK(report_to_csv(r, true).find("NA") == std::string::npos);
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["schema"] == 1);
    REQUIRE(j["points"].size() == 5);
    const std::string v = j["points"][0]["value"].get<std::string>();
    std::size_t digits = 0;
    for (char ch : v.substr(0, v.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(ch)) ? 1 : 0;
    CHECK(digits >= 30);
    CHECK(json_real(log(Real(2))).size() >= 30);
  }

  TEST_CASE("reports do not depend on the thread count") {
    const auto f = parse_poly("x0+x1+x2");
    ExperimentOptions one;
    ExperimentOptions three;
    three.threads = 3;
    const auto a = volume_experiment(f, {1, 4, 1}, one);
    const auto b = volume_experiment(f, {1, 4, 1}, three);
    CHECK(report_to_csv(a.h0) == report_to_csv(b.h0));
    CHECK(report_to_json(a.degree) == report_to_json(b.degree));
    CHECK(report_to_csv(szego_experiment(f, {1, 8, 1}, SzegoMode::Float, one)) ==
          report_to_csv(szego_experiment(f, {1, 8, 1}, SzegoMode::Float, three)));
  }
}
