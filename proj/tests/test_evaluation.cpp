#include <doctest.h>

#include <cmath>
#include <random>

#include "meronomy/common.hpp"
#include "meronomy/evaluation.hpp"
#include "test_util.hpp"

using namespace meronomy;

namespace {

RelationJudgment judged(std::string method, std::string parent, std::string child, bool ok,
                        std::string product = "p")
{
    return RelationJudgment{std::move(product), std::move(parent), std::move(child), std::move(method), {ok, ok, ok}};
}

Ontology tv_ontology()
{
    Ontology o;
    o.product = "tv";
    o.nodes = {
        {0, {"tv", "television"}, std::nullopt, {{"tv", 5}, {"television", 1}}, "tv"},
        {1, {"screen"}, 0, {{"screen", 3}}, "screen"},
        {2, {"remote_control"}, 0, {{"remote_control", 2}}, "remote_control"},
    };
    return o;
}

} // namespace

TEST_CASE("precision and f1 arithmetic")
{
    CHECK(precision(26, 32) == 81.25);
    CHECK(precision(45, 120) == 37.5);
    CHECK(std::abs(precision(93, 121) - 76.86) <= 0.01);
    CHECK(std::abs(precision(39, 124) - 31.45) <= 0.01);
    CHECK(std::abs(f1(75.0, 63.33) - 68.67) <= 0.01);
    CHECK(f1(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(precision(0, 0), DataError);
    std::vector<double> scores{60.0, 80.0};
    CHECK(macro_f1(scores) == 70.0);
    CHECK_THROWS_AS(macro_f1(std::span<const double>{}), DataError);
}

TEST_CASE("majority is strict")
{
    RelationJudgment j{"p", "a", "b", "m", {true, false}};
    CHECK_FALSE(j.majority());
    j.labels = {true, true, false};
    CHECK(j.majority());
}

TEST_CASE("relative recall uses the union of true relations")
{
    std::vector<RelationJudgment> js{
        judged("A", "x", "r1", true), judged("A", "x", "r2", true), judged("A", "x", "r3", true),
        judged("B", "x", "r2", true), judged("B", "x", "r9", false),
    };
    CHECK(relative_recall(js, "A") == doctest::Approx(100.0));
    CHECK(*relative_recall(js, "B") == doctest::Approx(100.0 / 3.0));
    CHECK(std::abs(*relative_recall(js, "B") - 33.33) <= 0.01);
    std::vector<RelationJudgment> none{judged("A", "x", "r1", false)};
    CHECK_FALSE(relative_recall(none, "A").has_value());
}

TEST_CASE("fleiss kappa: perfect agreement, worked example, random raters")
{
    std::vector<std::vector<std::size_t>> perfect{{3, 0}, {0, 3}, {3, 0}, {0, 3}};
    REQUIRE(fleiss_kappa(perfect).has_value());
    CHECK(*fleiss_kappa(perfect) == doctest::Approx(1.0));

    // 10 items, 14 raters, 5 categories. By hand: P_bar = 0.37802, P_e = 0.21276,
    // kappa = (0.37802 - 0.21276) / (1 - 0.21276) = 0.20993
    std::vector<std::vector<std::size_t>> m{
        {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0}, {2, 2, 8, 1, 1},
        {7, 7, 0, 0, 0},  {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2}, {6, 5, 2, 1, 0}, {0, 2, 2, 3, 7},
    };
    double p_bar = 0.0;
    std::vector<double> p_j(5, 0.0);
    for (const auto& row : m) {
        double agree = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            agree += double(row[k]) * (row[k] - 1.0);
            p_j[k] += row[k] / 140.0;
        }
        p_bar += agree / (14.0 * 13.0) / 10.0;
    }
    double p_e = 0.0;
    for (double p : p_j)
        p_e += p * p;
    const double expect = (p_bar - p_e) / (1.0 - p_e);
    CHECK(std::abs(expect - 0.2099) < 0.001);
    CHECK(*fleiss_kappa(m) == doctest::Approx(expect).epsilon(1e-12));

    std::mt19937_64 rng(1);
    std::vector<std::vector<bool>> random_labels;
    for (int i = 0; i < 3000; ++i)
        random_labels.push_back({bool(rng() & 1), bool(rng() & 1), bool(rng() & 1)});
    auto k = fleiss_kappa(random_labels);
    REQUIRE(k.has_value());
    CHECK(std::abs(*k) < 0.05);

    CHECK_FALSE(fleiss_kappa(std::vector<std::vector<std::size_t>>{{3, 0}}).has_value());
    CHECK_FALSE(fleiss_kappa(std::vector<std::vector<std::size_t>>{{3, 0}, {3, 0}}).has_value());
    CHECK_THROWS_AS(fleiss_kappa(std::vector<std::vector<std::size_t>>{{3, 0}, {1, 1}}), DataError);
}

TEST_CASE("judgment csv and report totals")
{
    testutil::TempDir dir("eval");
    testutil::write_file(dir / "j.csv",
                         "product,relation_parent,relation_child,method,rater1,rater2,rater3\n"
                         "tv,tv,screen,ours,true,true,false\n"
                         "tv,tv,\"Remote Control\",ours,yes,yes,yes\n"
                         "tv,screen,tv,base,0,0,1\n"
                         "tv,tv,screen,base,1,1,1\n"
                         "phone,phone,battery,ours,1,1,1\n"
                         "phone,phone,case,ours,0,0,0\n"
                         "phone,phone,battery,base,1,0,1\n");
    auto js = load_judgments_csv(dir / "j.csv");
    REQUIRE(js.size() == 7);
    CHECK(js[1].child == "remote_control");
    CHECK(js[0].labels == std::vector<bool>{true, true, false});

    auto report = evaluate_judgments(js);
    CHECK(report.products == std::vector<std::string>{"phone", "tv"});
    const auto& ours_tv = report.scores.at("tv").at("ours");
    CHECK(ours_tv.true_count == 2);
    CHECK(ours_tv.precision == 100.0);
    CHECK(*ours_tv.recall == 100.0); // O_tv = {tv>screen, tv>remote}
    const auto& base_tv = report.scores.at("tv").at("base");
    CHECK(base_tv.precision == 50.0);
    CHECK(*base_tv.recall == 50.0);
    // pooled: ours 3 of 4 true, 3 of 3 pooled true relations
    const auto& ours = report.totals.at("ours");
    CHECK(ours.precision == 75.0);
    CHECK(*ours.recall == 100.0);
    const double f_tv = f1(100.0, 100.0);
    const double f_phone = f1(50.0, 100.0);
    CHECK(ours.f1 == doctest::Approx((f_tv + f_phone) / 2.0));
    CHECK(report.kappa.has_value());
    CHECK(report.to_text().find("ours") != std::string::npos);

    testutil::write_file(dir / "bad.csv", "relation_parent,relation_child,method,rater1\ntv,screen,ours,maybe\n");
    CHECK_THROWS_AS(load_judgments_csv(dir / "bad.csv"), DataError);
}

TEST_CASE("qa evaluation on the television example")
{
    std::vector<QAInstance> qa{
        {"What are the dimensions of this TV?", "The screen is 38.5 inches.", "tv"},
        {"Does the remote control need batteries?", "Yes, two AA.", "tv"},
        {"Is it heavy?", "About 10 kg.", "tv"},
    };
    auto r = qa_eval(tv_ontology(), qa);
    CHECK(r.instances == 3);
    CHECK(r.aspect_hits == 2);
    CHECK(r.relation_hits == 1);
    CHECK(r.p_r <= r.p_a);
    CHECK_THROWS_AS(qa_eval(tv_ontology(), std::span<const QAInstance>{}), DataError);
}

TEST_CASE("random qa fixtures never give p_r above p_a")
{
    const std::vector<std::string> words{"tv", "screen", "remote", "control", "is", "the", "what", "battery", "good"};
    std::mt19937_64 rng(8);
    auto text = [&] {
        std::string s;
        const std::size_t len = rng() % 7;
        for (std::size_t k = 0; k < len; ++k)
            s += words[rng() % words.size()] + " ";
        return s;
    };
    const auto o = tv_ontology();
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<QAInstance> qa;
        const std::size_t n = 1 + rng() % 8;
        for (std::size_t k = 0; k < n; ++k)
            qa.push_back({text(), text(), "tv"});
        auto r = qa_eval(o, qa);
        CHECK(r.relation_hits <= r.aspect_hits);
        CHECK(r.p_r <= r.p_a);
    }
}
