#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jcr/receiver.hpp"
#include "support/scenes.hpp"

using namespace jcr;
using testsup::SceneOptions;
using testsup::random_scene;

namespace {

TransmitSignal comm_signal(const Scene& scene, int t, Rng& rng) {
  const auto phi = make_psk(t, 4, rng);
  CVec v = testsup::random_cvec(scene.comm_tx_count(), rng);
  v.normalize();
  return transmit_from_excitation(v, phi.symbols.transpose());
}

}  // namespace

TEST_CASE("case-1 synthesis") {
  Rng rng(41);
  SceneOptions opt;
  opt.targets = 0;
  opt.sigma2 = 0.5;

  SUBCASE("zero channels leave pure noise with the right variance") {
    Scene scene = random_scene(opt, rng);
    scene.h_ab.setZero();
    scene.h_ae.setZero();
    scene.h_ad.setZero();
    scene.h_cb.setZero();
    scene.h_ce.setZero();
    const int t = 4096;
    const auto s_ab = comm_signal(scene, t, rng);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, t);
    const auto radar = radar_emission_identity(bank);
    Rng noise_rng(42);
    const auto out = receive_case1(scene, s_ab, radar, noise_rng);
    for (int r = 0; r < opt.n_comm_rx; ++r) {
      const double var = out.bob.samples.row(r).squaredNorm() / t;
      CHECK(std::abs(var - opt.sigma2) < 0.05 * opt.sigma2);
    }
    CHECK(out.bob.clean.norm() == 0.0);
  }

  SUBCASE("noiseless interference-free record is exactly H_AB s_AB") {
    Scene scene = random_scene(opt, rng);
    scene.h_cb.setZero();
    scene.h_ce.setZero();
    scene.sigma2_b = scene.sigma2_d = scene.sigma2_e = 1e-30;
    const auto s_ab = comm_signal(scene, 64, rng);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, 64);
    Rng noise_rng(43);
    const auto out =
        receive_case1(scene, s_ab, radar_emission_identity(bank), noise_rng);
    CHECK((out.bob.samples - scene.h_ab * s_ab.samples).norm() <
          1e-10 * out.bob.samples.norm());
    CHECK((out.bob.clean - scene.h_ab * s_ab.samples).norm() == 0.0);
  }

  SUBCASE("zero transmit weights leave noise only") {
    Scene scene = random_scene(opt, rng);
    const int t = 32;
    TransmitSignal s_ab;
    s_ab.weight = CVec::Zero(opt.n_comm_tx);
    s_ab.samples = CMat::Zero(opt.n_comm_tx, t);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, t);
    RadarEmission radar = radar_emission_identity(bank);
    radar.samples.setZero();
    Rng a(7), b(7);
    const auto out = receive_case1(scene, s_ab, radar, a);
    Scene zeroed = scene;
    zeroed.h_ab.setZero();
    zeroed.h_ae.setZero();
    zeroed.h_ad.setZero();
    zeroed.h_cb.setZero();
    zeroed.h_ce.setZero();
    const auto noise_only = receive_case1(zeroed, s_ab, radar, b);
    CHECK((out.bob.samples - noise_only.bob.samples).norm() == 0.0);
  }
}

TEST_CASE("case-2 synthesis") {
  Rng rng(47);
  SceneOptions opt;
  opt.targets = 2;

  SUBCASE("no targets reduces to case 1 draw for draw") {
    SceneOptions no_targets = opt;
    no_targets.targets = 0;
    Scene scene = random_scene(no_targets, rng);
    const auto s_ab = comm_signal(scene, 64, rng);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, 64);
    const auto radar = radar_emission_identity(bank);
    Rng r1(5), r2(5);
    const auto c1 = receive_case1(scene, s_ab, radar, r1);
    const auto c2 = receive_case2(scene, s_ab, radar, r2);
    CHECK((c1.bob.samples - c2.bob.samples).norm() == 0.0);
    CHECK((c1.radar.samples - c2.radar.samples).norm() == 0.0);
  }

  SUBCASE("zero reflectivity reduces to case 1; no direct radar term at D") {
    Scene scene = random_scene(opt, rng);
    for (auto& h : scene.h_lb) h.setZero();
    for (auto& h : scene.h_le) h.setZero();
    for (auto& h : scene.h_ld) h.setZero();
    const auto s_ab = comm_signal(scene, 64, rng);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, 64);
    const auto radar = radar_emission_identity(bank);
    Rng r1(9), r2(9);
    const auto c2 = receive_case2(scene, s_ab, radar, r1);
    const auto c1 = receive_case1(scene, s_ab, radar, r2);
    CHECK((c2.radar.samples - c1.radar.samples).norm() == 0.0);
    // Structurally: y_D = H_AD s_AB + n, no radar-transmitter leak.
    Scene noiseless = scene;
    noiseless.sigma2_b = noiseless.sigma2_d = noiseless.sigma2_e = 1e-30;
    Rng r3(9);
    const auto quiet = receive_case2(noiseless, s_ab, radar, r3);
    CHECK((quiet.radar.samples - scene.h_ad * s_ab.samples).norm() <
          1e-10 * quiet.radar.samples.norm());
  }

  SUBCASE("doubling a target channel is additive in the bounce") {
    Scene one = random_scene(opt, rng);
    one.h_lb.resize(1);
    one.h_le.resize(1);
    one.h_ld.resize(1);
    Scene two = one;
    two.h_lb.push_back(two.h_lb[0]);
    two.h_le.push_back(two.h_le[0]);
    two.h_ld.push_back(two.h_ld[0]);
    const auto s_ab = comm_signal(one, 32, rng);
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, 32);
    const auto radar = radar_emission_identity(bank);
    Rng r1(3), r2(3);
    const auto y1 = receive_case2(one, s_ab, radar, r1);
    const auto y2 = receive_case2(two, s_ab, radar, r2);
    const CMat bounce = one.h_lb[0] * radar.samples;
    CHECK((y2.bob.samples - y1.bob.samples - bounce).norm() <
          1e-12 * bounce.norm());
  }

  SUBCASE("superposition with a shared noise draw") {
    Scene scene = random_scene(opt, rng);
    const auto sig_a = comm_signal(scene, 32, rng);
    const auto sig_b = comm_signal(scene, 32, rng);
    TransmitSignal sum;
    sum.weight = sig_a.weight + sig_b.weight;
    sum.samples = sig_a.samples + sig_b.samples;
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, 32);
    const auto radar = radar_emission_identity(bank);
    Rng ra(77), rb(77), rs(77), rn(77);
    const auto ya = receive_case2(scene, sig_a, radar, ra);
    const auto yb = receive_case2(scene, sig_b, radar, rb);
    const auto ys = receive_case2(scene, sum, radar, rs);
    TransmitSignal zero;
    zero.weight = CVec::Zero(scene.comm_tx_count());
    zero.samples = CMat::Zero(scene.comm_tx_count(), 32);
    RadarEmission no_radar = radar;
    no_radar.samples.setZero();
    const auto noise = receive_case2(scene, zero, no_radar, rn);
    const CMat lhs = ys.bob.samples;
    const CMat rhs = ya.bob.samples + yb.bob.samples - noise.bob.samples -
                     (scene.h_cb * radar.samples) -
                     (scene.h_lb[0] + scene.h_lb[1]) * radar.samples;
    CHECK((lhs - rhs).norm() < 1e-10 * lhs.norm());
  }
}

TEST_CASE("trace-form SINRs and rates") {
  Rng rng(53);
  SceneOptions opt;
  opt.targets = 2;
  Scene scene = random_scene(opt, rng);

  CVec v_ab = testsup::random_cvec(opt.n_comm_tx, rng);
  v_ab.normalize();
  CVec v_k = testsup::random_cvec(opt.n_radar_tx, rng);
  v_k.normalize();
  const CMat w_ab = v_ab * v_ab.adjoint();
  const CMat w_k = v_k * v_k.adjoint();
  const CMat w_k_zero = CMat::Zero(opt.n_radar_tx, opt.n_radar_tx);

  SUBCASE("interference-free reduction") {
    const double g = sinr_bob(scene, w_ab, w_k_zero);
    const double expect =
        (scene.h_ab * w_ab * scene.h_ab.adjoint()).real().trace() /
        scene.sigma2_b;
    CHECK(g == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("zero comm weight gives zero SINR") {
    CHECK(sinr_bob(scene, CMat::Zero(opt.n_comm_tx, opt.n_comm_tx), w_k) ==
          0.0);
  }
  SUBCASE("non-PSD weight matrices are rejected") {
    CMat bad = w_ab;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(sinr_bob(scene, bad, w_k), DimensionError);
    CMat not_hermitian = w_ab;
    not_hermitian(0, 1) += std::complex<double>(0.5, 0.5);
    CHECK_THROWS_AS(sinr_bob(scene, not_hermitian, w_k), DimensionError);
  }

  SUBCASE("trace forms match time-averaged powers") {
    const int t = 8192;
    Rng wave_rng(61);
    const auto phi = make_psk(t, 4, wave_rng);
    const auto s_ab = transmit_from_excitation(v_ab, phi.symbols.transpose());
    const auto bank = make_orthogonal_bank(opt.n_radar_tx, t);
    const auto radar = radar_emission_from_excitation(v_k, bank);

    const double sig = (scene.h_ab * s_ab.samples).squaredNorm() / t;
    double intf = (scene.h_cb * radar.samples).squaredNorm() / t;
    for (const auto& h : scene.h_lb)
      intf += (h * radar.samples).squaredNorm() / t;
    const double sampled = sig / (intf + scene.sigma2_b);
    CHECK(sinr_bob(scene, w_ab, w_k) ==
          doctest::Approx(sampled).epsilon(0.01));

    const double ret_sampled = [&] {
      double acc = 0.0;
      for (const auto& h : scene.h_ld)
        acc += (h * radar.samples).squaredNorm() / t;
      const double leak = (scene.h_ad * s_ab.samples).squaredNorm() / t;
      return std::log2(1.0 + acc / (leak + scene.sigma2_d));
    }();
    CHECK(radar_rate(scene, w_ab, w_k) ==
          doctest::Approx(ret_sampled).epsilon(0.01));
  }

  SUBCASE("bounded Eve SINR decreases with the disc radius") {
    // With the radar silent the SINR is proportional to alpha-hat squared.
    PathLossModel pl{1e-3, 1.0};
    const NodePosition tx{0.0, 0.0};
    double prev = std::numeric_limits<double>::infinity();
    for (double radius : {0.0, 2.0, 8.0}) {
      Scene s = scene;
      const double a_hat = eve_bounded_alpha(pl, tx, {{30.0, 40.0}, radius});
      s.h_ae = a_hat * CMat::Ones(opt.n_comm_rx, opt.n_comm_tx);
      const double g = sinr_eve_bounded(s, w_ab, w_k_zero);
      CHECK(g < prev);
      prev = g;
    }
  }

  SUBCASE("secrecy rate arithmetic") {
    CHECK(secrecy_rate(1.0, 1.0) == 0.0);
    CHECK(secrecy_rate(3.0, 1.0) == doctest::Approx(1.0));
    CHECK(secrecy_rate(0.0, 5.0) == 0.0);
    CHECK_THROWS_AS(secrecy_rate(-0.1, 1.0), DimensionError);
  }

  SUBCASE("zero radar weight gives zero radar rate") {
    CHECK(radar_rate(scene, w_ab, w_k_zero) == 0.0);
  }
}

TEST_CASE("receive record container round trip") {
  Rng rng(59);
  ReceiveRecord rec;
  rec.samples = testsup::rank1(3, 17, rng) + testsup::rank1(3, 17, rng);
  rec.clean = testsup::rank1(3, 17, rng);

  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  save_record(ss, rec, true);
  const ReceiveRecord back = load_record(ss);
  CHECK((back.samples - rec.samples).norm() == 0.0);
  CHECK((back.clean - rec.clean).norm() == 0.0);

  std::stringstream no_clean(std::ios::in | std::ios::out | std::ios::binary);
  save_record(no_clean, rec, false);
  const ReceiveRecord back2 = load_record(no_clean);
  CHECK((back2.samples - rec.samples).norm() == 0.0);
  CHECK(back2.clean.norm() == 0.0);

  std::stringstream junk(std::ios::in | std::ios::out | std::ios::binary);
  junk << "not a record\n";
  CHECK_THROWS_AS(load_record(junk), ConfigError);
}
