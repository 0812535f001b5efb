#include <doctest.h>

#include <cmath>

#include "jcr/autoencoder.hpp"
#include "jcr/baselines.hpp"
#include "support/scenes.hpp"

using namespace jcr;
namespace bl = jcr::baselines;

TEST_CASE("null-space projector properties") {
  Rng rng(501);

  SUBCASE("zero cross channel leaves the signal untouched") {
    TransmitSignal s;
    s.weight = testsup::random_cvec(4, rng);
    s.samples = testsup::rank1(4, 16, rng);
    ChannelMatrix zero;
    zero.matrix = CMat::Zero(3, 4);
    const auto out = bl::null_space_project(zero, s);
    CHECK((out.samples - s.samples).norm() == 0.0);
  }

  SUBCASE("signal already in the null space is unchanged") {
    const CMat cross = testsup::rank1(3, 4, rng);
    const auto proj = bl::NullSpaceProjector::from_channel(cross);
    const CVec inside = proj.basis.col(0);
    TransmitSignal s;
    s.weight = inside.conjugate();
    s.samples = inside * Eigen::RowVectorXcd::Ones(8);
    ChannelMatrix ch;
    ch.matrix = cross;
    const auto out = bl::null_space_project(ch, s);
    CHECK((out.samples - s.samples).norm() < 1e-12 * s.samples.norm());
  }

  SUBCASE("rank-1 cross channel, four-antenna transmitter") {
    for (int trial = 0; trial < 10; ++trial) {
      const CMat cross = testsup::rank1(3, 4, rng);
      const auto proj = bl::NullSpaceProjector::from_channel(cross);
      CHECK(proj.basis.cols() == 3);
      // Orthonormal columns annihilated by the channel.
      CHECK((proj.basis.adjoint() * proj.basis - CMat::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((cross * proj.basis).cwiseAbs().maxCoeff() <
            1e-10 * cross.cwiseAbs().maxCoeff());

      const CMat p = proj.projector();
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

      TransmitSignal s;
      s.weight = testsup::random_cvec(4, rng);
      s.samples = testsup::random_cvec(4, rng) *
                  Eigen::RowVectorXcd::Ones(32);
      ChannelMatrix ch;
      ch.matrix = cross;
      const auto out = bl::null_space_project(ch, s);
      const double leak_before = (cross * s.samples).squaredNorm();
      const double leak_after = (cross * out.samples).squaredNorm();
      CHECK(leak_after <= 1e-20 * std::max(leak_before, 1e-300));
      const double ratio = out.samples.squaredNorm() / s.samples.squaredNorm();
      CHECK(ratio >= 0.0);
      CHECK(ratio <= 1.0 + 1e-12);
    }
  }

  SUBCASE("full-rank cross channel has no null space") {
    CMat full = CMat::Zero(4, 4);
    Rng local(3);
    for (int i = 0; i < 4; ++i) full += testsup::rank1(4, 4, local);
    CHECK_THROWS_AS(bl::NullSpaceProjector::from_channel(full),
                    InfeasibleError);
  }
}

TEST_CASE("known-channel least-squares oracle") {
  Rng rng(502);
  const int n_rx = 4, t = 64, m = 4;

  // Shared fixture pieces: comm column, radar columns, orthogonal rows.
  const CVec h_comm = testsup::random_cvec(n_rx, rng);
  std::vector<CVec> g(m);
  for (auto& col : g) col = testsup::random_cvec(n_rx, rng);
  const auto bank = make_orthogonal_bank(m, t);

  Eigen::RowVectorXcd symbols(t);
  for (int i = 0; i < t; ++i)
    symbols(i) = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));

  CVec amps(m);
  for (int i = 0; i < m; ++i) amps(i) = rng.complex_gaussian();

  const CMat clean_comm = h_comm * symbols;
  CMat radar_part = CMat::Zero(n_rx, t);
  for (int i = 0; i < m; ++i)
    radar_part += g[i] * amps(i) * bank.samples.row(i);

  bl::OracleModel model;
  model.per_time_column = h_comm;
  model.static_columns = g;
  model.static_rows = bank.samples;
  model.desired_is_per_time = true;

  SUBCASE("noiseless, interference-free: exact recovery") {
    ReceiveRecord rec;
    rec.samples = clean_comm;
    rec.clean = clean_comm;
    bl::OracleModel solo = model;
    solo.static_columns.clear();
    solo.static_rows = CMat(0, t);
    const CMat est = bl::known_channel_oracle(rec, solo);
    // The documented 1e-8 ridge leaves an equally tiny relative bias.
    const double rms = clean_comm.norm() / std::sqrt(double(n_rx) * t);
    CHECK(rmse(est, clean_comm) < 1e-7 * rms);
  }

  SUBCASE("noise only: error matches the projection floor") {
    const double sigma = 0.4;
    double acc = 0.0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
      CMat noise(n_rx, t);
      for (int r = 0; r < n_rx; ++r)
        for (int c = 0; c < t; ++c) noise(r, c) = sigma * rng.complex_gaussian();
      ReceiveRecord rec;
      rec.samples = clean_comm + noise;
      rec.clean = clean_comm;
      bl::OracleModel solo = model;
      solo.static_columns.clear();
      solo.static_rows = CMat(0, t);
      const CMat est = bl::known_channel_oracle(rec, solo);
      acc += rmse(est, clean_comm);
    }
    // One complex dimension of noise survives out of n_rx.
    const double predicted = sigma / std::sqrt(static_cast<double>(n_rx));
    CHECK(acc / trials == doctest::Approx(predicted).epsilon(0.10));
  }

  SUBCASE("known-subspace interference is removed") {
    const double sigma = 0.05;
    CMat noise(n_rx, t);
    for (int r = 0; r < n_rx; ++r)
      for (int c = 0; c < t; ++c) noise(r, c) = sigma * rng.complex_gaussian();
    ReceiveRecord rec;
    rec.samples = clean_comm + radar_part + noise;
    rec.clean = clean_comm;
    const CMat est = bl::known_channel_oracle(rec, model);
    CHECK(rmse(est, clean_comm) < rmse(rec.samples, rec.clean));
    CHECK(rmse(est, clean_comm) < 3.0 * sigma);
  }

  SUBCASE("radar side: static part is the desired reconstruction") {
    bl::OracleModel radar_model = model;
    radar_model.desired_is_per_time = false;
    ReceiveRecord rec;
    rec.samples = clean_comm + radar_part;
    rec.clean = radar_part;
    const CMat est = bl::known_channel_oracle(rec, radar_model);
    CHECK(rmse(est, radar_part) < 1e-6 * radar_part.norm());
  }

  SUBCASE("degenerate inputs take the documented ridge path") {
    bl::OracleModel degenerate = model;
    degenerate.static_columns = {g[0], g[0]};  // singular normal equations
    degenerate.static_rows = CMat(2, t);
    degenerate.static_rows.row(0) = bank.samples.row(0);
    degenerate.static_rows.row(1) = bank.samples.row(0);
    ReceiveRecord rec;
    rec.samples = clean_comm + g[0] * bank.samples.row(0);
    rec.clean = clean_comm;
    const CMat est = bl::known_channel_oracle(rec, degenerate);
    CHECK(est.allFinite());
    CHECK(rmse(est, clean_comm) < 1e-3 * clean_comm.norm());
  }
}
