#include <catch2/catch_amalgamated.hpp>

#include "mmc/datagen.hpp"
#include "mmc/engine.hpp"
#include "mmc/io.hpp"
#include "mmc/rng.hpp"
#include "mmc/version.hpp"

using namespace mmc;

TEST_CASE("dataset CSV round-trips bit-exactly") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(30);
        const std::size_t d = 1 + rng.uniform_index(6);
        std::vector<Vector> points;
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n; ++i) {
            Vector p(d);
            for (double& x : p) x = rng.uniform(-1e6, 1e6) * std::pow(10.0, -double(rng.uniform_index(12)));
            points.push_back(std::move(p));
            labels.push_back(rng.uniform01() < 0.5 ? Label::Black : Label::White);
        }
        const bool labeled = trial % 3 != 0;
        const Dataset data = labeled
                                 ? make_dataset(points, labels)
                                 : make_dataset(points);
        const Dataset back = dataset_from_csv(dataset_to_csv(data));
        REQUIRE(back.size() == data.size());
        REQUIRE(back.dim == data.dim);
        CHECK(back.points == data.points);
        CHECK(back.labeled() == data.labeled());
        if (data.labeled()) CHECK(*back.labels == *data.labels);
        // Save(load(x)) is also stable.
        CHECK(dataset_to_csv(back) == dataset_to_csv(data));
    }
}

TEST_CASE("dataset CSV parses the documented format") {
    const Dataset d = dataset_from_csv("x0,x1,label\n0.5,-1,+1\n-2,3,-1\n");
    REQUIRE(d.size() == 2);
    CHECK(d.dim == 2);
    CHECK(d.points[0] == Vector{0.5, -1});
    CHECK((*d.labels)[0] == Label::White);
    CHECK((*d.labels)[1] == Label::Black);

    const Dataset pool = dataset_from_csv("x0,label\n1,\n2,\n");
    CHECK_FALSE(pool.labeled());
}

TEST_CASE("dataset CSV rejects malformed input") {
    CHECK_THROWS_AS(dataset_from_csv(""), ParseError);
    CHECK_THROWS_AS(dataset_from_csv("a,b\n1,2\n"), ParseError);
    CHECK_THROWS_AS(dataset_from_csv("x0,label\n"), ParseError);             // no rows
    CHECK_THROWS_AS(dataset_from_csv("x0,label\n1,2,3\n"), ParseError);      // ragged
    CHECK_THROWS_AS(dataset_from_csv("x0,label\nfoo,+1\n"), ParseError);     // bad number
    CHECK_THROWS_AS(dataset_from_csv("x0,label\n1,2\n"), ParseError);        // bad label
    CHECK_THROWS_AS(dataset_from_csv("x0,label\n1,+1\n2,\n"), ParseError);   // mixed labels
    CHECK_THROWS_AS(dataset_from_csv("x0,x2,label\n1,2,+1\n"), ParseError);  // bad header
    CHECK_THROWS_AS(dataset_from_csv("x0,label\nnan,+1\n"), ParseError);     // non-finite
}

TEST_CASE("slab JSON round-trips and reads from report files") {
    const Slab s{{0.1, -2.5}, {3.25, 4.75}};
    const json j = slab_to_json(s, 0.25);
    const Slab back = slab_from_json(json::parse(j.dump()));
    CHECK(back.anchor_b == s.anchor_b);
    CHECK(back.anchor_w == s.anchor_w);

    json report;
    report["final_slab"] = j;
    const Slab from_report = slab_from_json(report);
    CHECK(from_report.anchor_b == s.anchor_b);

    CHECK_THROWS_AS(slab_from_json(json::parse("{}")), ParseError);
    CHECK_THROWS_AS(slab_from_json(json::parse(R"({"anchor_b":[0],"anchor_w":[1,2]})")),
                    ParseError);
}

TEST_CASE("run report JSON round-trips losslessly") {
    const PlantedInstance inst = gen_planted({2, 30, 0.6, 5.0, 99});
    EngineConfig cfg;
    cfg.epsilon = 0.2;
    const TrainReport rep = train_offline(inst.data, cfg);
    REQUIRE(rep.converged);

    RunMeta meta;
    meta.version = kVersion;
    meta.dataset_checksum = checksum_hex(dataset_to_csv(inst.data));
    meta.wall_seconds = 0.0421875;  // dyadic, representable
    meta.mode = "offline";
    meta.oracle = "none";
    meta.sample_m = 90;
    meta.rng_seed = 7;
    meta.tol = cfg.tol;
    meta.cap_constant = cfg.cap_constant;

    const std::string text = report_to_json(rep, meta).dump(2);
    const auto [back, meta_back] = report_from_json(json::parse(text));

    CHECK(back.converged == rep.converged);
    CHECK(back.final_ell == rep.final_ell);
    CHECK(back.width == rep.width);
    CHECK(back.iterations == rep.iterations);
    CHECK(back.case_a_count == rep.case_a_count);
    CHECK(back.case_b_count == rep.case_b_count);
    CHECK(back.labeling_calls == rep.labeling_calls);
    CHECK(back.counterexample_calls == rep.counterexample_calls);
    CHECK(back.epsilon == rep.epsilon);
    CHECK(back.iteration_cap == rep.iteration_cap);
    CHECK(back.final_slab.anchor_b == rep.final_slab.anchor_b);
    CHECK(back.final_slab.anchor_w == rep.final_slab.anchor_w);
    CHECK(back.cert_min_weight == rep.cert_min_weight);
    CHECK(back.cert_max_sum_error == rep.cert_max_sum_error);
    CHECK(back.cert_max_reconstruction_error == rep.cert_max_reconstruction_error);
    REQUIRE(back.trace.size() == rep.trace.size());
    for (std::size_t i = 0; i < rep.trace.size(); ++i) {
        CHECK(back.trace[i].iteration == rep.trace[i].iteration);
        CHECK(back.trace[i].kind == rep.trace[i].kind);
        CHECK(back.trace[i].chosen_index == rep.trace[i].chosen_index);
        CHECK(back.trace[i].label == rep.trace[i].label);
        CHECK(back.trace[i].ell_before == rep.trace[i].ell_before);
        CHECK(back.trace[i].ell_after == rep.trace[i].ell_after);
        REQUIRE(back.trace[i].geometry.has_value() == rep.trace[i].geometry.has_value());
        if (rep.trace[i].geometry) {
            CHECK(back.trace[i].geometry->foot == rep.trace[i].geometry->foot);
            CHECK(back.trace[i].geometry->t_unclamped == rep.trace[i].geometry->t_unclamped);
            CHECK(back.trace[i].geometry->t_clamped == rep.trace[i].geometry->t_clamped);
            CHECK(back.trace[i].geometry->cos_alpha == rep.trace[i].geometry->cos_alpha);
        }
    }
    CHECK(meta_back.version == meta.version);
    CHECK(meta_back.dataset_checksum == meta.dataset_checksum);
    CHECK(meta_back.wall_seconds == meta.wall_seconds);
    CHECK(meta_back.mode == meta.mode);
    CHECK(meta_back.oracle == meta.oracle);
    CHECK(meta_back.sample_m == meta.sample_m);
    CHECK(meta_back.rng_seed == meta.rng_seed);
    CHECK(meta_back.tol == meta.tol);
    CHECK(meta_back.explicit_cap == meta.explicit_cap);

    // A second serialization of the parsed report is byte-identical.
    CHECK(report_to_json(back, meta_back).dump(2) == text);
}

TEST_CASE("trace CSV has one row per iteration") {
    const PlantedInstance inst = gen_planted({2, 20, 0.5, 4.0, 3});
    EngineConfig cfg;
    cfg.epsilon = 0.3;
    const TrainReport rep = train_offline(inst.data, cfg);
    const std::string csv = trace_to_csv(rep);

    std::size_t rows = 0;
    for (const char c : csv) {
        if (c == '\n') ++rows;
    }
    CHECK(rows == static_cast<std::size_t>(rep.iterations) + 1);  // header included
    CHECK(csv.rfind("iteration,case,index,ell,cos_alpha,t_unclamped\n", 0) == 0);
    // The terminal row carries no index and no geometry columns.
    CHECK(csv.find(",terminal,,") != std::string::npos);
}

TEST_CASE("format_double round-trips arbitrary doubles") {
    Rng rng(2718);
    for (int trial = 0; trial < 2000; ++trial) {
        double x = rng.uniform(-1.0, 1.0) * std::pow(10.0, double(rng.uniform_index(600)) - 300.0);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(parse_double(format_double(0.0)) == 0.0);
    CHECK(parse_double("1e-3") == 1e-3);
    CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
}

TEST_CASE("checksum is stable and input-sensitive") {
    CHECK(checksum_hex("") == "fnv1a64:cbf29ce484222325");
    CHECK(checksum_hex("a") != checksum_hex("b"));
    CHECK(checksum_hex("abc") == checksum_hex("abc"));
}
