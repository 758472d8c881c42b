#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "coalflow/coalflow.h"

using json = nlohmann::json;

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(coalflow_version()) > 0);

  coalflow_drift* drift = nullptr;
  const coalflow_status bad =
      coalflow_drift_create("nonsense", nullptr, 0, &drift);
  CHECK(bad == COALFLOW_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(coalflow_last_error()) > 0);
  CHECK(drift == nullptr);

  double value = 0.0;
  CHECK(coalflow_oracle_normal_cdf(0.0, &value) == COALFLOW_OK);
  CHECK(value == 0.5);
  CHECK(std::strlen(coalflow_last_error()) == 0);
}

TEST_CASE("drift handles") {
  coalflow_drift* drift = nullptr;
  const double c = 2.0;
  REQUIRE(coalflow_drift_create("linear", &c, 1, &drift) == COALFLOW_OK);
  double value = 0.0;
  CHECK(coalflow_drift_eval(drift, 1.5, &value) == COALFLOW_OK);
  CHECK(value == 3.0);
  CHECK(coalflow_drift_lipschitz(drift, &value) == COALFLOW_OK);
  CHECK(value == 2.0);
  coalflow_drift_destroy(drift);
}

TEST_CASE("oracle scalars") {
  double phi = 0.0;
  REQUIRE(coalflow_oracle_phi_c(0.5, 1.0, &phi) == COALFLOW_OK);
  CHECK(phi == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

  double surv = 0.0;
  REQUIRE(coalflow_oracle_meeting_survival_linear(0.5, 0.0, 0.5, 1.0, &surv) ==
          COALFLOW_OK);
  CHECK(surv == doctest::Approx(std::erf(0.5 / (2.0 * std::sqrt(phi)))));

  double never = 0.0;
  REQUIRE(coalflow_oracle_meeting_never_prob_linear(-1.0, 0.0, 0.5, &never) ==
          COALFLOW_OK);
  CHECK(never == 0.0);

  double l = 0.0, bound = 0.0;
  REQUIRE(coalflow_oracle_l_defect(1.0, 0.0, &l) == COALFLOW_OK);
  CHECK(l == 1.0);
  REQUIRE(coalflow_oracle_l_upper_bound(1.0, 2.0, &bound) == COALFLOW_OK);
  CHECK(bound == doctest::Approx(0.9251 / 4.0).epsilon(1e-3));

  CHECK(coalflow_oracle_l_defect(-1.0, 0.5, &l) ==
        COALFLOW_ERR_INVALID_ARGUMENT);

  double ecs = 0.0;
  REQUIRE(coalflow_oracle_expected_cluster_size_linear(1.0, 0.01, &ecs) ==
          COALFLOW_OK);
  CHECK(ecs == doctest::Approx(0.112).epsilon(0.01));
}

TEST_CASE("meet run: summary, samples document, determinism") {
  coalflow_drift* drift = nullptr;
  REQUIRE(coalflow_drift_create("zero", nullptr, 0, &drift) == COALFLOW_OK);

  const double ts[2] = {0.5, 1.0};
  coalflow_run* run1 = nullptr;
  REQUIRE(coalflow_run_meet(drift, 0.0, 0.5, 1.0, 1e-3, ts, 2, 4000, 42, 2,
                            &run1) == COALFLOW_OK);
  const json summary = json::parse(coalflow_run_summary(run1));
  CHECK(summary.at("meet_probability").get<double>() ==
        doctest::Approx(0.7237).epsilon(0.03));
  CHECK(summary.at("have_oracle").get<bool>());
  CHECK(summary.at("survival").size() == 2);

  REQUIRE(coalflow_run_document_count(run1) == 1);
  CHECK(std::string(coalflow_run_document_name(run1, 0)) == "samples.csv");
  const std::string csv = coalflow_run_document_content(run1, 0);
  CHECK(csv.rfind("# coalflow-schema v1", 0) == 0);
  CHECK(csv.find("replica,met,time") != std::string::npos);

  // same seed, different thread count: byte-identical output
  coalflow_run* run2 = nullptr;
  REQUIRE(coalflow_run_meet(drift, 0.0, 0.5, 1.0, 1e-3, ts, 2, 4000, 42, 1,
                            &run2) == COALFLOW_OK);
  CHECK(std::string(coalflow_run_summary(run1)) ==
        std::string(coalflow_run_summary(run2)));
  CHECK(csv == std::string(coalflow_run_document_content(run2, 0)));

  coalflow_run_destroy(run1);
  coalflow_run_destroy(run2);
  coalflow_drift_destroy(drift);
}

TEST_CASE("trotter record run emits the split-record schema") {
  coalflow_drift* drift = nullptr;
  REQUIRE(coalflow_drift_create("cosine", nullptr, 0, &drift) == COALFLOW_OK);
  const double starts[2] = {0.0, 0.3};
  coalflow_run* run = nullptr;
  REQUIRE(coalflow_run_trotter_record(drift, starts, 2, 4, 1e-3, 7, &run) ==
          COALFLOW_OK);
  const json summary = json::parse(coalflow_run_summary(run));
  CHECK(summary.at("bookkeeping_identity").get<bool>());
  const std::string csv = coalflow_run_document_content(run, 0);
  CHECK(csv.find("time,particle_id,X,m,is_partition_point,jump") !=
        std::string::npos);
  coalflow_run_destroy(run);
  coalflow_drift_destroy(drift);
}

TEST_CASE("prop1 run returns one estimate per n") {
  const int ns[2] = {1, 4};
  coalflow_run* run = nullptr;
  REQUIRE(coalflow_run_prop1(ns, 2, 0.0, 0.0, 1.0, 2000, 1e-3, 11, 2, &run) ==
          COALFLOW_OK);
  const json summary = json::parse(coalflow_run_summary(run));
  REQUIRE(summary.at("estimates").size() == 2);
  // n=1, r=0, s=0, t=1: the sum is the squared terminal value, mean 1
  const double est = summary["estimates"][0]["estimate"].get<double>();
  const double se = summary["estimates"][0]["stderr"].get<double>();
  CHECK(std::abs(est - 1.0) <= 3.0 * se);
  coalflow_run_destroy(run);
}

TEST_CASE("sandwich run reports the zero-case bitwise check") {
  coalflow_drift* drift = nullptr;
  REQUIRE(coalflow_drift_create("cosine", nullptr, 0, &drift) == COALFLOW_OK);
  coalflow_run* run = nullptr;
  REQUIRE(coalflow_run_sandwich(drift, 0.0, 0.5, 1.0, 1.0, 1e-3, 500, 3, 2,
                                &run) == COALFLOW_OK);
  const json summary = json::parse(coalflow_run_summary(run));
  CHECK(summary.at("holds").get<std::uint64_t>() == 500);
  CHECK(summary.at("zero_case_bitwise").get<bool>());
  coalflow_run_destroy(run);
  coalflow_drift_destroy(drift);
}
