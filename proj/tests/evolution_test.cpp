#include "pelab/evolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pelab/transport.hpp"

namespace pelab {
namespace {

Dataset sensitive_points(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform_ball(Point::Zero(2), 0.6, n, rng);
}

PeConfig base_config() {
  PeConfig cfg;
  cfg.T = 5;
  cfg.n_s = 40;
  cfg.sigma = 0.0;
  cfg.projection = ProjectionMode::BlProjection;
  cfg.seed = 11;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(PeRun, ZeroIterationsReturnsInitialSample) {
  const Dataset S = sensitive_points(50, 1);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.T = 0;
  SensitiveDataset handle(S);
  const RunTrace trace = pe_run(handle, cfg, api, PointMass{Point::Zero(2)});
  ASSERT_EQ(trace.records.size(), 1u);
  EXPECT_EQ(trace.histogram_reads, 0);
  EXPECT_EQ(trace.final_dataset, Dataset::Zero(2, 40));
  EXPECT_NEAR(trace.final_w1(), empirical_w1(S, Dataset::Zero(2, 1)), 1e-12);
}

TEST(PeRun, SyntheticSizeAndCandidates) {
  const Dataset S = sensitive_points(60, 2);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  for (ProjectionMode mode :
       {ProjectionMode::BlProjection, ProjectionMode::ThresholdRenormalize, ProjectionMode::LaplaceThreshold}) {
    PeConfig cfg = base_config();
    cfg.projection = mode;
    cfg.sigma = mode == ProjectionMode::LaplaceThreshold ? 0.0 : 0.05;
    cfg.laplace_privacy = {1.0, 1e-3};
    const RunTrace trace = pe_run(S, cfg, api, UniformBall{});
    ASSERT_EQ(trace.records.size(), 6u);
    for (const auto& r : trace.records) {
      EXPECT_EQ(r.synthetic_size, 40);
      if (r.t > 0) {
        EXPECT_EQ(r.candidates, 40 * api.contract().v);
        EXPECT_EQ(r.mechanism, to_string(mode));
      }
    }
    EXPECT_EQ(trace.final_dataset.cols(), 40);
    EXPECT_TRUE(contains_all(api.domain(), trace.final_dataset));
  }
}

TEST(PeRun, ReadsSensitiveDataOncePerIteration) {
  const Dataset S = sensitive_points(30, 3);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.T = 7;
  cfg.sigma = 0.02;
  cfg.evaluation = Evaluation::None;
  SensitiveDataset handle(S);
  const RunTrace trace = pe_run(handle, cfg, api, UniformBall{});
  EXPECT_EQ(handle.histogram_reads(), 7);
  EXPECT_EQ(trace.histogram_reads, 7);
  EXPECT_EQ(handle.evaluation_reads(), 0);
  for (const auto& r : trace.records) EXPECT_TRUE(std::isnan(r.w1));

  cfg.evaluation = Evaluation::FinalOnly;
  SensitiveDataset again(S);
  const RunTrace final_only = pe_run(again, cfg, api, UniformBall{});
  EXPECT_EQ(again.evaluation_reads(), 1);
  EXPECT_FALSE(std::isnan(final_only.final_w1()));
  EXPECT_TRUE(std::isnan(final_only.records[3].w1));
}

TEST(PeRun, BitIdenticalUnderSeed) {
  const Dataset S = sensitive_points(40, 4);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.sigma = 0.03;
  const RunTrace a = pe_run(S, cfg, api, UniformBall{});
  const RunTrace b = pe_run(S, cfg, api, UniformBall{});
  EXPECT_EQ(a.final_dataset, b.final_dataset);
  EXPECT_EQ(a.w1_series(), b.w1_series());
  cfg.seed = 12;
  const RunTrace c = pe_run(S, cfg, api, UniformBall{});
  EXPECT_NE(a.final_dataset, c.final_dataset);
}

TEST(PeRun, NoiselessProjectionKeepsExactHistogram) {
  const Dataset S = sensitive_points(40, 5);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.record_bl_error = true;
  const RunTrace bl = pe_run(S, cfg, api, UniformBall{});
  for (std::size_t t = 1; t < bl.records.size(); ++t) EXPECT_EQ(bl.records[t].bl_err, 0.0);

  // With sigma = 0 the projection is the identity, so resampling draws from the
  // exact histogram and matches the unthresholded variant draw for draw.
  cfg.projection = ProjectionMode::ThresholdRenormalize;
  cfg.threshold_H = 0.0;
  const RunTrace plain = pe_run(S, cfg, api, UniformBall{});
  EXPECT_EQ(bl.final_dataset, plain.final_dataset);

  Rng rng(6);
  const Dataset V = api.vary_dataset(random_api(api.domain(), 10, UniformBall{}, rng), rng);
  const Eigen::VectorXd hist = nn_histogram(S, V);
  EXPECT_EQ(bl_project_simplex(DiscreteMeasure(V, hist), 2.0).measure.weights, hist);
}

TEST(PeRun, NoiselessRunApproachesData) {
  const Dataset S = sensitive_points(25, 7);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.02);
  PeConfig cfg = base_config();
  cfg.T = 40;
  cfg.n_s = 100;
  const RunTrace trace = pe_run(S, cfg, api, PointMass{Eigen::Vector2d(0.9, 0.0)});
  const auto w = trace.w1_series();
  EXPECT_LT(w.back(), 0.25 * w.front());
  EXPECT_LT(plateau_level(w, 5), 0.1);
}

TEST(PeRun, DegenerateThresholdFallsBackToUniform) {
  const Dataset S = sensitive_points(30, 8);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.projection = ProjectionMode::ThresholdRenormalize;
  cfg.threshold_H = 2.0;
  const RunTrace trace = pe_run(S, cfg, api, UniformBall{});
  for (std::size_t t = 1; t < trace.records.size(); ++t) EXPECT_TRUE(trace.records[t].degenerate);
  EXPECT_EQ(trace.final_dataset.cols(), 40);
}

TEST(PeRun, RejectsBadInput) {
  const Dataset S = sensitive_points(10, 9);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.n_s = 0;
  EXPECT_THROW(pe_run(S, cfg, api, UniformBall{}), std::invalid_argument);
  cfg = base_config();
  cfg.sigma = -1;
  EXPECT_THROW(pe_run(S, cfg, api, UniformBall{}), std::invalid_argument);
  cfg = base_config();
  EXPECT_THROW(pe_run(Dataset(3, 5), cfg, api, UniformBall{}), std::invalid_argument);
  EXPECT_THROW(pe_run(Dataset(2, 0), cfg, api, UniformBall{}), std::invalid_argument);
  EXPECT_THROW(projection_mode_from_string("nope"), std::invalid_argument);
  EXPECT_EQ(projection_mode_from_string("laplace_threshold"), ProjectionMode::LaplaceThreshold);
}

TEST(PriorVariant, Multiplicity) {
  EXPECT_EQ(prior_multiplicity(10, 0.44, 3), 3);
  EXPECT_EQ(prior_multiplicity(10, 0.5, 1), 5);
  EXPECT_EQ(prior_multiplicity(100, 0.01, 4), 0);
  EXPECT_THROW(prior_multiplicity(10, 0.5, 0), std::invalid_argument);
}

TEST(PriorVariant, DegenerateKeepsPreviousDataset) {
  const Dataset S = sensitive_points(20, 10);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  SensitiveDataset handle(S);
  const RunTrace trace = pe_prior_theoretical_run(handle, cfg, api, PointMass{Point::Zero(2)}, 1, 2.0);
  EXPECT_EQ(handle.histogram_reads(), cfg.T);
  for (std::size_t t = 1; t < trace.records.size(); ++t) EXPECT_TRUE(trace.records[t].degenerate);
  EXPECT_EQ(trace.final_dataset, Dataset::Zero(2, 20));
}

TEST(PriorVariant, CopiesFollowHistogram) {
  const Dataset S = sensitive_points(20, 11);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  PeConfig cfg = base_config();
  cfg.T = 3;
  const RunTrace trace = pe_prior_theoretical_run(S, cfg, api, UniformBall{}, 1, 0.0);
  // Without noise and B = 1 every copy count is n times an integer multiple of 1/n.
  for (const auto& r : trace.records) EXPECT_EQ(r.synthetic_size, 20);
}

TEST(Contraction, EnvelopeChecks) {
  const std::vector<double> flat(6, 1.0);
  EXPECT_TRUE(evaluate_gamma_contraction(flat, 0.1, 1.0).holds);
  EXPECT_FALSE(evaluate_gamma_contraction(flat, 0.1, 0.0).holds);

  std::vector<double> geometric;
  for (int t = 0; t < 10; ++t) geometric.push_back(std::pow(0.9, t));
  const ContractionFit loose = evaluate_gamma_contraction(geometric, 0.05, 0.0);
  EXPECT_TRUE(loose.holds);
  EXPECT_NEAR(loose.bound[3], std::pow(0.95, 3), 1e-15);
  EXPECT_NEAR(loose.max_violation, 0.0, 1e-15);
  EXPECT_FALSE(evaluate_gamma_contraction(geometric, 0.2, 0.0).holds);
  EXPECT_THROW(evaluate_gamma_contraction({1.0}, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(evaluate_gamma_contraction(flat, 1.0, 0.0), std::invalid_argument);

  EXPECT_EQ(plateau_level({5, 4, 1, 2, 1.5}, 3), 2.0);
}

TEST(Aggregate, MeanAndStandardError) {
  const auto [m, se] = mean_and_stderr({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_NEAR(se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(mean_and_stderr({7}).second, 0.0);

  RunTrace a, b;
  for (int t = 0; t < 3; ++t) {
    a.records.push_back({t, 1.0 + t, 0, false, 0, 0, 0, 0, ""});
    b.records.push_back({t, 3.0 + t, 0, false, 0, 0, 0, 0, ""});
  }
  const AggregateTrace agg = aggregate_traces({a, b});
  EXPECT_EQ(agg.n_seeds, 2);
  EXPECT_EQ(agg.mean, (std::vector<double>{2, 3, 4}));
  EXPECT_DOUBLE_EQ(agg.std_error[1], 1.0);
  b.records.pop_back();
  EXPECT_THROW(aggregate_traces({a, b}), std::invalid_argument);
}

TEST(Output, CsvWriters) {
  const auto dir = std::filesystem::temp_directory_path() / "pelab_evolution_test";
  std::filesystem::create_directories(dir);
  RunTrace trace;
  trace.records.push_back({0, 0.5, std::nan(""), false, 0, 0, 0, 0, ""});
  trace.records.push_back({1, 0.25, 0.125, true, 0, 0, 0, 0, ""});
  const std::string tp = (dir / "trace.csv").string();
  write_trace_csv(tp, trace);
  EXPECT_EQ(slurp(tp), "t,w1,bl_err,degenerate\n0,0.5,nan,0\n1,0.25,0.125,1\n");

  AggregateTrace agg{{0.5, 0.25}, {0.0, 0.1}, 3};
  const std::string ap = (dir / "agg.csv").string();
  write_aggregate_csv(ap, agg);
  EXPECT_EQ(slurp(ap), "t,mean_w1,stderr_w1,n_seeds\n0,0.5,0,3\n1,0.25,0.10000000000000001,3\n");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace pelab
