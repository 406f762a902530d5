#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hoplab/dataset.hpp"
#include "hoplab/prompts.hpp"

using namespace hoplab;
using dataset::MultiHopInstance;
using dataset::PromptMode;

namespace {

const std::string kFixtureDir = HOPLAB_FIXTURE_DIR;

MultiHopInstance sample_instance() {
    const auto report = dataset::load_instances(kFixtureDir + "/mquake_sample.jsonl");
    REQUIRE(report.instances.size() == 1);
    return report.instances[0];
}

// Small synthetic record with every field under our control.
MultiHopInstance make_synthetic(int64_t id) {
    MultiHopInstance inst;
    inst.case_id = id;
    inst.subject = "ent_a" + std::to_string(id);
    inst.rewrites.push_back({"the boss of {} is", "ent_a" + std::to_string(id), "ent_b", "ent_x",
                             "who is the boss?"});
    inst.questions = {"q one", "q two", "q three"};
    inst.answer = "ent_c";
    inst.answer_aliases = {"entity c"};
    inst.new_answer = "ent_y";
    inst.single_hops = {{"q hop1", "the boss of ent_a is", "ent_b", {}},
                        {"q hop2", "the home of ent_b is", "ent_c", {}}};
    inst.new_single_hops = {{"q hop1", "the boss of ent_a is", "ent_x", {}},
                            {"q hop2", "the home of ent_x is", "ent_y", {}}};
    return inst;
}

}  // namespace

TEST_CASE("appendix sample loads with expected fields") {
    const auto inst = sample_instance();
    CHECK(inst.case_id == 16);
    CHECK(inst.answer == "United States of America");
    CHECK(inst.new_answer == "Latvia");
    CHECK(inst.subject == "Twitter");
    CHECK(inst.shortcut_frequency == 35435);
    REQUIRE(inst.rewrites.size() == 1);
    CHECK(inst.rewrites[0].subject == "Jack Dorsey");
    CHECK(inst.rewrites[0].target_new == "Latvia");
    REQUIRE(inst.single_hops.size() == 2);
    CHECK(inst.single_hops[1].cloze == "Jack Dorsey is a citizen of");
    CHECK(inst.new_single_hops[1].answer == "Latvia");
}

TEST_CASE("record missing questions is rejected with a field path") {
    const std::string jsonl =
        R"({"case_id": 1, "requested_rewrite": [{"prompt": "{} x", "subject": "s", "target_true": "a", "target_new": "b"}], "answer": "a", "new_answer": "b", "single_hops": [], "new_single_hops": []})"
        "\n" +
        dataset::to_jsonl({make_synthetic(2)});
    const auto report = dataset::parse_instances(jsonl, "test");
    REQUIRE(report.rejections.size() == 1);
    CHECK(report.rejections[0].field_path == "questions");
    CHECK(report.rejections[0].line == 1);
    CHECK(report.instances.size() == 1);
}

TEST_CASE("zero valid records is a load error") {
    CHECK_THROWS_AS(dataset::parse_instances(R"({"case_id": 1})", "test"), std::runtime_error);
    CHECK_THROWS_AS(dataset::parse_instances("", "test"), std::runtime_error);
}

TEST_CASE("validation catches the named invariants") {
    auto base = make_synthetic(1);

    SUBCASE("placeholder count") {
        base.rewrites[0].prompt_template = "no placeholder";
        const std::string jsonl = dataset::to_jsonl({base, make_synthetic(2)});
        const auto report = dataset::parse_instances(jsonl, "test");
        REQUIRE(report.rejections.size() == 1);
        CHECK(report.rejections[0].field_path == "requested_rewrite[0].prompt");
    }
    SUBCASE("target_true != target_new") {
        base.rewrites[0].target_new = base.rewrites[0].target_true;
        const auto report =
            dataset::parse_instances(dataset::to_jsonl({base, make_synthetic(2)}), "test");
        REQUIRE(report.rejections.size() == 1);
        CHECK(report.rejections[0].field_path == "requested_rewrite[0].target_new");
    }
    SUBCASE("hop count bounds") {
        base.single_hops.resize(1);
        base.new_single_hops.resize(1);
        const auto report =
            dataset::parse_instances(dataset::to_jsonl({base, make_synthetic(2)}), "test");
        REQUIRE(report.rejections.size() == 1);
        CHECK(report.rejections[0].field_path == "single_hops");
    }
    SUBCASE("hop list length mismatch") {
        base.new_single_hops.push_back(base.new_single_hops.back());
        const auto report =
            dataset::parse_instances(dataset::to_jsonl({base, make_synthetic(2)}), "test");
        REQUIRE(report.rejections.size() == 1);
        CHECK(report.rejections[0].field_path == "new_single_hops");
    }
    SUBCASE("broken chain is a warning, not a rejection") {
        base.single_hops[0].answer = "unrelated_entity";
        const auto report =
            dataset::parse_instances(dataset::to_jsonl({base, make_synthetic(2)}), "test");
        CHECK(report.rejections.empty());
        REQUIRE(report.warnings.size() == 1);
        CHECK(report.warnings[0].field_path == "single_hops[1]");
        CHECK(report.instances.size() == 2);
    }
}

TEST_CASE("save/load round-trip is byte identical") {
    std::vector<MultiHopInstance> instances;
    for (int i = 0; i < 10; ++i) instances.push_back(make_synthetic(i));
    instances[3].shortcut_frequency = 42;
    instances[5].subject.clear();

    const std::string once = dataset::to_jsonl(instances);
    const auto report = dataset::parse_instances(once, "test");
    REQUIRE(report.instances.size() == 10);
    CHECK(dataset::to_jsonl(report.instances) == once);

    const std::string path = "/tmp/hoplab_dataset_roundtrip.jsonl";
    dataset::save_instances(instances, path);
    const auto loaded = dataset::load_instances(path);
    CHECK(dataset::to_jsonl(loaded.instances) == once);
    std::remove(path.c_str());
}

TEST_CASE("json array input is accepted") {
    const std::string arr = "[" + dataset::to_jsonl({make_synthetic(1)}) + "]";
    const auto report = dataset::parse_instances(arr, "test");
    CHECK(report.instances.size() == 1);
}

TEST_CASE("augment_shortcut_frequency from stats") {
    corpus::CooccurrenceStats stats;
    stats.pair_counts[{"Twitter", "United States of America"}] = 35435;

    auto inst = sample_instance();
    inst.shortcut_frequency.reset();
    const auto outcome = dataset::augment_shortcut_frequency({inst}, stats);
    CHECK(outcome.errors.empty());
    CHECK(outcome.instances[0].shortcut_frequency == 35435);

    SUBCASE("zero count augments to zero") {
        stats.pair_counts[{"Twitter", "United States of America"}] = 0;
        const auto o2 = dataset::augment_shortcut_frequency({inst}, stats);
        CHECK(o2.instances[0].shortcut_frequency == 0);
    }
    SUBCASE("missing pair leaves instance unaugmented with an error") {
        corpus::CooccurrenceStats empty;
        const auto o3 = dataset::augment_shortcut_frequency({inst}, empty);
        REQUIRE(o3.errors.size() == 1);
        CHECK(o3.errors[0].case_id == 16);
        CHECK(!o3.instances[0].shortcut_frequency.has_value());
    }
    SUBCASE("fixture of 5 instances matches manual lookup") {
        corpus::CooccurrenceStats s;
        std::vector<MultiHopInstance> batch;
        for (int i = 0; i < 5; ++i) {
            batch.push_back(make_synthetic(i));
            s.pair_counts[{batch.back().subject, batch.back().answer}] =
                static_cast<uint64_t>(10 * i);
        }
        const auto o = dataset::augment_shortcut_frequency(batch, s);
        CHECK(o.errors.empty());
        for (int i = 0; i < 5; ++i)
            CHECK(o.instances[static_cast<size_t>(i)].shortcut_frequency ==
                  static_cast<uint64_t>(10 * i));
    }
}

TEST_CASE("partition_by_frequency boundary is inclusive on <=") {
    std::vector<MultiHopInstance> instances;
    for (uint64_t c : {0u, 10u, 11u}) {
        auto inst = make_synthetic(static_cast<int64_t>(c));
        inst.shortcut_frequency = c;
        instances.push_back(inst);
    }
    const auto [le, gt] = dataset::partition_by_frequency(instances, 10);
    REQUIRE(le.size() == 2);
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].shortcut_frequency == 11);

    SUBCASE("tau=0 sends all counts >= 1 to the upper side") {
        const auto [le0, gt0] = dataset::partition_by_frequency(instances, 0);
        CHECK(le0.size() == 1);
        CHECK(gt0.size() == 2);
    }
    SUBCASE("sizes always sum to the input size") {
        for (uint64_t tau : {0u, 5u, 10u, 11u, 1000u}) {
            const auto [a, b] = dataset::partition_by_frequency(instances, tau);
            CHECK(a.size() + b.size() == instances.size());
        }
    }
    SUBCASE("unaugmented instance is an error") {
        instances[0].shortcut_frequency.reset();
        CHECK_THROWS_AS(dataset::partition_by_frequency(instances, 10), std::invalid_argument);
    }
}

TEST_CASE("few-shot prompt: fixed demonstrations, ends at A:") {
    const auto inst = sample_instance();
    const auto p = dataset::render_prompt(inst, PromptMode::few_shot, 0);
    CHECK(p.text.starts_with(
        "Q: Who is the spouse of the US president? A: Jill Biden\n"
        "Q: In which country is the company that created Nissan 200SX located? A: Japan\n"));
    CHECK(p.text.ends_with("Q: What is the country of citizenship of Twitter's CEO? A:"));
    CHECK(p.answer_prefix == "A:");

    SUBCASE("question index selects the paraphrase") {
        const auto p1 = dataset::render_prompt(inst, PromptMode::few_shot, 1);
        CHECK(p1.text.ends_with("Q: From which country does Twitter's CEO hold citizenship? A:"));
        CHECK_THROWS_AS(dataset::render_prompt(inst, PromptMode::few_shot, 3),
                        std::out_of_range);
        CHECK_THROWS_AS(dataset::render_prompt(inst, PromptMode::few_shot, -1),
                        std::out_of_range);
    }
    SUBCASE("rendering is deterministic") {
        const auto again = dataset::render_prompt(inst, PromptMode::few_shot, 0);
        CHECK(again.text == p.text);
    }
}

TEST_CASE("single-hop prompt is a 2-shot cloze continuation") {
    const auto inst = sample_instance();
    const auto p = dataset::render_single_hop(inst.single_hops[0]);
    CHECK(p.text.ends_with("The chief executive officer of Twitter is"));
    const auto demos = dataset::default_prompt_style().few_shot_demos;
    CHECK(p.text.starts_with(demos[0]));
}

TEST_CASE("chain-of-thought prompt has Thoughts scaffolding and ends at Answer:") {
    const auto inst = sample_instance();
    const auto p = dataset::render_prompt(inst, PromptMode::chain_of_thought, 0);
    CHECK(p.text.find("Thoughts:") != std::string::npos);
    CHECK(p.text.ends_with("Answer:"));
    CHECK(p.answer_prefix == "Answer:");

    SUBCASE("thoughts are spliced verbatim") {
        const auto withts = dataset::render_prompt(inst, PromptMode::chain_of_thought, 0,
                                                   dataset::default_prompt_style(),
                                                   " The CEO is in the US.");
        CHECK(withts.text.find("Thoughts: The CEO is in the US.\nAnswer:") != std::string::npos);
    }
    SUBCASE("cot parts split around the thoughts slot") {
        const auto parts = dataset::render_cot_parts(inst, 0);
        CHECK(parts.before_thoughts.ends_with("Thoughts:"));
        CHECK(parts.after_thoughts == "\nAnswer:");
        const auto full = dataset::render_prompt(inst, PromptMode::chain_of_thought, 0);
        CHECK(parts.before_thoughts + parts.after_thoughts == full.text);
    }
}

TEST_CASE("demonstrations_count knob truncates the demo block") {
    const auto inst = sample_instance();
    auto style = dataset::default_prompt_style();
    style.demonstrations_count = 0;
    const auto p = dataset::render_prompt(inst, PromptMode::few_shot, 0, style);
    CHECK(p.text == "Q: What is the country of citizenship of Twitter's CEO? A:");
    style.demonstrations_count = 1;
    const auto p1 = dataset::render_prompt(inst, PromptMode::few_shot, 0, style);
    CHECK(p1.text.starts_with("Q: Who is the spouse of the US president? A: Jill Biden\nQ: What"));
}
