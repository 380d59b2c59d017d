#include "hycomm/messaging.hpp"

#include <cmath>
#include <cstring>
#include <doctest.h>
#include <fstream>

#include "oracles.hpp"

#ifndef HYCOMM_FIXTURE_DIR
#define HYCOMM_FIXTURE_DIR "tests/fixtures"
#endif

using namespace hycomm;

namespace {

DetectionSet make_dets(const std::vector<double>& confidences) {
  DetectionSet dets;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    Detection d;
    d.box = OrientedBox3(5.0 * static_cast<double>(i), 0, 1, 4, 2, 2, 0.1);
    d.c = confidences[i];
    dets.items.push_back(d);
  }
  return dets;
}

HybridMessage random_message(Rng& rng, std::size_t max_boxes = 20,
                             std::size_t max_points = 60) {
  HybridMessage msg;
  const auto rand_f32 = [&rng] {
    return static_cast<float>(uniform_in(rng, -1e4, 1e4));
  };
  msg.sender_pose = {rand_f32(), rand_f32(), static_cast<float>(uniform_in(rng, -3.14, 3.14))};
  const std::size_t nb = static_cast<std::size_t>(uniform_in(rng, 0.0, max_boxes + 1.0));
  const std::size_t np = static_cast<std::size_t>(uniform_in(rng, 0.0, max_points + 1.0));
  for (std::size_t i = 0; i < nb; ++i) {
    msg.boxes.push_back(WireBox{rand_f32(), rand_f32(), rand_f32(), rand_f32(), rand_f32(),
                                rand_f32(), rand_f32()});
  }
  for (std::size_t i = 0; i < np; ++i) {
    msg.points.push_back(WirePoint{rand_f32(), rand_f32(), rand_f32(), rand_f32()});
  }
  return msg;
}

std::vector<std::uint8_t> read_fixture(const char* name) {
  std::ifstream in(std::string(HYCOMM_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("allocate_budget") {
  CHECK(allocate_budget(Budget{100}, 10).b_box == 10);
  CHECK(allocate_budget(Budget{100}, 10).b_point == 7);  // floor((100 - 70) / 4)
  CHECK(allocate_budget(Budget{35}, 10).b_box == 5);
  CHECK(allocate_budget(Budget{35}, 10).b_point == 0);
  CHECK(allocate_budget(Budget{0}, 10).b_box == 0);
  CHECK(allocate_budget(Budget{0}, 10).b_point == 0);
  CHECK(allocate_budget(Budget{7 * 12}, 12).b_point == 0);
  CHECK(allocate_budget(Budget{7 * 12 + 40}, 12).b_point == 10);
}

TEST_CASE("select_boxes") {
  SUBCASE("worked example matches the exhaustive maximum") {
    const std::vector<double> c{0.9, 0.2, 0.7};
    const SelectionMask mask = select_boxes(c, 2);
    CHECK(mask.bits == std::vector<std::uint8_t>{1, 0, 1});
    CHECK(oracle::mask_score(c, mask.bits) == doctest::Approx(1.6));
    CHECK(oracle::mask_score(c, mask.bits) == oracle::best_subset_score_oracle(c, 2));
  }

  SUBCASE("zero budget selects nothing") {
    CHECK(select_boxes({0.5, 0.9}, 0).count() == 0);
  }

  SUBCASE("budget at or above K selects everything") {
    CHECK(select_boxes({0.5, 0.9, 0.1}, 3).bits == std::vector<std::uint8_t>{1, 1, 1});
    CHECK(select_boxes({0.5, 0.9, 0.1}, 10).bits == std::vector<std::uint8_t>{1, 1, 1});
  }

  SUBCASE("ties break toward the lower index") {
    const SelectionMask mask = select_boxes({0.5, 0.5, 0.5}, 2);
    CHECK(mask.bits == std::vector<std::uint8_t>{1, 1, 0});
  }

  SUBCASE("always optimal on random instances") {
    Rng rng = make_rng(51);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 1 + static_cast<std::size_t>(uniform_in(rng, 0, 10));
      std::vector<double> c;
      for (std::size_t i = 0; i < k; ++i) c.push_back(uniform01(rng));
      const std::size_t b = static_cast<std::size_t>(uniform_in(rng, 0, k + 1.0));
      const SelectionMask mask = select_boxes(c, b);
      CHECK(mask.count() <= b);
      CHECK(oracle::mask_score(c, mask.bits) == oracle::best_subset_score_oracle(c, b));
    }
  }
}

TEST_CASE("pack_box_message") {
  const DetectionSet dets = make_dets({0.9, 0.2, 0.7});

  SUBCASE("empty mask gives an empty message") {
    SelectionMask none;
    none.bits.assign(3, 0);
    CHECK(pack_box_message(dets, none).empty());
  }

  SUBCASE("a selected record carries the seven box parameters verbatim") {
    SelectionMask only0;
    only0.bits = {1, 0, 0};
    const auto boxes = pack_box_message(dets, only0);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0] == to_wire(dets.items[0].box));
  }

  SUBCASE("records come out in descending confidence order") {
    SelectionMask mask;
    mask.bits = {1, 0, 1};
    const auto boxes = pack_box_message(dets, mask);
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0] == to_wire(dets.items[0].box));  // c = 0.9
    CHECK(boxes[1] == to_wire(dets.items[2].box));  // c = 0.7
  }

  SUBCASE("mask length must match") {
    SelectionMask bad;
    bad.bits = {1};
    CHECK_THROWS_AS(pack_box_message(dets, bad), std::invalid_argument);
  }
}

TEST_CASE("expand_boxes") {
  PackerConfig cfg;

  SUBCASE("zero uncertainty is the identity") {
    DetectionSet dets = make_dets({0.5});
    dets.items[0].ux = dets.items[0].uy = 0.0;
    CHECK(expand_boxes(dets, cfg)[0] == dets.items[0].box);
  }

  SUBCASE("direct substitution") {
    DetectionSet dets;
    Detection d;
    d.box = OrientedBox3(0, 0, 1, 4, 2, 2, 0.3);
    d.ux = 0.25;  // 2 sqrt(0.25) = 1.0
    d.uy = 0.04;  // 2 sqrt(0.04) = 0.4
    dets.items.push_back(d);
    const auto out = expand_boxes(dets, cfg);
    CHECK(out[0].l == doctest::Approx(5.0));
    CHECK(out[0].w == doctest::Approx(2.4));
    CHECK(out[0].h == doctest::Approx(2.0));
    CHECK(out[0].yaw == doctest::Approx(0.3));
  }

  SUBCASE("the cap binds") {
    DetectionSet dets;
    Detection d;
    d.box = OrientedBox3(0, 0, 1, 4, 2, 2, 0);
    d.ux = 100.0;
    d.uy = 100.0;
    dets.items.push_back(d);
    const auto out = expand_boxes(dets, cfg);
    CHECK(out[0].l == doctest::Approx(4.0 + cfg.expand_cap));
    CHECK(out[0].w == doctest::Approx(2.0 + cfg.expand_cap));
  }
}

TEST_CASE("weight_points") {
  PackerConfig cfg;
  const PointCloud cloud{{0, 0, 1, 0}, {10, 0, 1, 0}, {20, 0, 1, 0}};

  SUBCASE("no detections: everything gets delta") {
    const auto w = weight_points(cloud, {}, DetectionSet{}, cfg);
    CHECK(w == std::vector<double>(3, cfg.delta));
  }

  SUBCASE("containment assigns the detection's summed variance") {
    DetectionSet dets;
    Detection d;
    d.box = OrientedBox3(0, 0, 1, 4, 2, 2, 0);
    d.ux = 0.2;
    d.uy = 0.1;
    dets.items.push_back(d);
    const auto w = weight_points(cloud, expand_boxes(dets, cfg), dets, cfg);
    CHECK(w[0] == doctest::Approx(0.3));
    CHECK(w[1] == cfg.delta);
    CHECK(w[2] == cfg.delta);
  }

  SUBCASE("overlapping boxes take the max") {
    DetectionSet dets;
    Detection d1;
    d1.box = OrientedBox3(0, 0, 1, 4, 2, 2, 0);
    d1.ux = 0.05;
    d1.uy = 0.05;  // sum 0.1
    Detection d2;
    d2.box = OrientedBox3(0.5, 0, 1, 4, 2, 2, 0);
    d2.ux = 0.3;
    d2.uy = 0.1;  // sum 0.4
    dets.items = {d1, d2};
    const auto w = weight_points(cloud, dets.boxes(), dets, cfg);
    CHECK(w[0] == doctest::Approx(0.4));
  }

  SUBCASE("all weights stay positive") {
    DetectionSet dets;
    Detection d;
    d.box = OrientedBox3(0, 0, 1, 4, 2, 2, 0);
    d.ux = d.uy = 0.0;  // would weight 0 without the delta floor
    dets.items.push_back(d);
    const auto w = weight_points(cloud, dets.boxes(), dets, cfg);
    for (double v : w) CHECK(v >= cfg.delta);
  }
}

TEST_CASE("weighted_sample_indices") {
  SUBCASE("budget at or above the cloud returns everything in order") {
    Rng rng = make_rng(61);
    const std::vector<double> w(5, 1.0);
    CHECK(weighted_sample_indices(w, 5, rng) ==
          std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(weighted_sample_indices(w, 99, rng) ==
          std::vector<std::size_t>{0, 1, 2, 3, 4});
  }

  SUBCASE("equal weights sample uniformly") {
    Rng rng = make_rng(62);
    const std::vector<double> w(4, 0.7);
    std::array<int, 4> hits{};
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
      const auto idx = weighted_sample_indices(w, 1, rng);
      ++hits[idx[0]];
    }
    for (int h : hits) {
      CHECK(static_cast<double>(h) / reps == doctest::Approx(0.25).epsilon(0.08));
    }
  }

  SUBCASE("a dominant weight wins almost always") {
    Rng rng = make_rng(63);
    const std::vector<double> w{1.0, 1e-3, 1e-3, 1e-3};
    int heavy = 0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
      if (weighted_sample_indices(w, 1, rng)[0] == 0) ++heavy;
    }
    CHECK(heavy >= static_cast<int>(0.99 * reps));
  }

  SUBCASE("selection frequency is ordered by weight") {
    Rng rng = make_rng(64);
    const std::vector<double> w{0.7, 0.3};
    int first = 0;
    const int reps = 10000;
    for (int i = 0; i < reps; ++i) {
      if (weighted_sample_indices(w, 1, rng)[0] == 0) ++first;
    }
    // one-sided margin of 3 binomial sigmas around 1/2
    const double sigma3 = 3.0 * std::sqrt(0.25 * reps);
    CHECK(first > reps / 2.0 + sigma3);
  }

  SUBCASE("rejects non-positive weights") {
    Rng rng = make_rng(65);
    CHECK_THROWS_AS(weighted_sample_indices({1.0, 0.0}, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(weighted_sample_indices({1.0, -2.0}, 1, rng), std::invalid_argument);
  }
}

TEST_CASE("pack_hybrid") {
  PackerConfig cfg;
  Rng cloud_rng = make_rng(71);
  DetectionSet dets = make_dets({0.9, 0.8, 0.7, 0.6});
  PointCloud cloud;
  for (int i = 0; i < 100; ++i) {
    cloud.push_back(Point3{uniform_in(cloud_rng, -20, 20), uniform_in(cloud_rng, -20, 20),
                           1.0, uniform01(cloud_rng)});
  }
  const std::size_t k = dets.size();

  SUBCASE("zero budget gives an empty message") {
    Rng rng = make_rng(72);
    const HybridMessage msg = pack_hybrid(dets, cloud, Budget{0}, cfg, rng);
    CHECK(msg.boxes.empty());
    CHECK(msg.points.empty());
  }

  SUBCASE("budget exactly 7K carries every box and no points") {
    Rng rng = make_rng(73);
    const HybridMessage msg = pack_hybrid(dets, cloud, Budget{7 * k}, cfg, rng);
    CHECK(msg.boxes.size() == k);
    CHECK(msg.points.empty());
  }

  SUBCASE("the remainder buys points at 4 floats each") {
    Rng rng = make_rng(74);
    const HybridMessage msg = pack_hybrid(dets, cloud, Budget{7 * k + 40}, cfg, rng);
    CHECK(msg.boxes.size() == k);
    CHECK(msg.points.size() == 10);
  }

  SUBCASE("payload never exceeds the budget") {
    Rng rng = make_rng(75);
    for (int trial = 0; trial < 500; ++trial) {
      const std::uint64_t budget = static_cast<std::uint64_t>(uniform_in(rng, 0, 600));
      const HybridMessage msg = pack_hybrid(dets, cloud, Budget{budget}, cfg, rng);
      CHECK(4 * msg.payload_bytes() <= 16 * budget);  // payload_bytes <= 4 * budget
    }
  }
}

TEST_CASE("wire codec") {
  SUBCASE("empty message is header only") {
    HybridMessage msg;
    msg.sender_pose = {1.5f, -2.25f, 0.5f};
    const auto bytes = serialize(msg);
    CHECK(bytes.size() == kWireHeaderBytes);
    CHECK(deserialize(bytes) == msg);
  }

  SUBCASE("per-record payload costs") {
    HybridMessage one_box;
    one_box.boxes.push_back(WireBox{1, 2, 3, 4, 5, 6, 0.5f});
    CHECK(one_box.payload_bytes() == 28);
    CHECK(serialize(one_box).size() == kWireHeaderBytes + 28);

    HybridMessage one_point;
    one_point.points.push_back(WirePoint{1, 2, 3, 0.5f});
    CHECK(one_point.payload_bytes() == 16);
    CHECK(serialize(one_point).size() == kWireHeaderBytes + 16);
  }

  SUBCASE("layout is little-endian with the documented framing") {
    HybridMessage msg;
    msg.sender_pose = {1.0f, 2.0f, 0.0f};
    msg.boxes.push_back(WireBox{1, 0, 0, 1, 1, 1, 0});
    const auto bytes = serialize(msg);
    CHECK(bytes[0] == 'H');
    CHECK(bytes[1] == 'Y');
    CHECK(bytes[2] == 'C');
    CHECK(bytes[3] == '1');
    CHECK(bytes[4] == 1);  // version lo
    CHECK(bytes[5] == 0);  // version hi
    // pose.x == 1.0f -> 0x3f800000 little-endian
    CHECK(bytes[6] == 0x00);
    CHECK(bytes[7] == 0x00);
    CHECK(bytes[8] == 0x80);
    CHECK(bytes[9] == 0x3f);
    CHECK(bytes[18] == 1);  // n_boxes lo
    CHECK(bytes[22] == 0);  // n_points lo
  }

  SUBCASE("round trip is bit exact on fuzzed messages") {
    Rng rng = make_rng(81);
    for (int trial = 0; trial < 500; ++trial) {
      const HybridMessage msg = random_message(rng);
      const HybridMessage back = deserialize(serialize(msg));
      CHECK(back == msg);
    }
  }

  SUBCASE("malformed frames are rejected") {
    HybridMessage msg;
    msg.points.push_back(WirePoint{1, 2, 3, 4});
    auto bytes = serialize(msg);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize(bad_magic), WireFormatError);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(deserialize(truncated), WireFormatError);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(deserialize(trailing), WireFormatError);

    auto bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_AS(deserialize(bad_version), WireFormatError);

    auto bad_count = bytes;
    bad_count[22] = 7;  // claims 7 points, carries 1
    CHECK_THROWS_AS(deserialize(bad_count), WireFormatError);

    CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{'H', 'Y', 'C', '1'}),
                    WireFormatError);
  }

  SUBCASE("golden fixtures match bit for bit") {
    HybridMessage empty;
    empty.sender_pose = {1.5f, -2.25f, 0.5f};
    CHECK(serialize(empty) == read_fixture("wire_empty.bin"));

    HybridMessage one_box;
    one_box.sender_pose = {10.0f, -4.0f, 1.25f};
    one_box.boxes.push_back(
        WireBox{12.5f, -3.75f, 0.9f, 4.5f, 1.875f, 1.5f, 0.78539816f});
    CHECK(serialize(one_box) == read_fixture("wire_one_box.bin"));

    HybridMessage mixed;
    mixed.sender_pose = {-7.25f, 0.5f, -2.0f};
    mixed.boxes.push_back(WireBox{1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f, 0.5f});
    mixed.boxes.push_back(WireBox{-1.5f, 2.5f, -3.5f, 4.25f, 0.125f, 6.75f, -0.25f});
    mixed.points.push_back(WirePoint{0.0f, -0.0f, 1e30f, 0.25f});
    mixed.points.push_back(WirePoint{100.0f, -200.0f, 0.5f, 1.0f});
    mixed.points.push_back(WirePoint{-3.25f, 7.125f, 0.0f, 0.0f});
    const auto fixture = read_fixture("wire_mixed.bin");
    CHECK(serialize(mixed) == fixture);
    CHECK(deserialize(fixture) == mixed);
  }
}
