#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "trident/error.hpp"
#include "trident/fixtures.hpp"
#include "trident/matrix_hash.hpp"

using namespace trident;
using trident::test::OracleRow;

namespace {

ShuffleLabel L(std::string_view text) { return ShuffleLabel::parse(text); }

}  // namespace

TEST_CASE("shuffle labels render and parse") {
    CHECK(L("4F") == ShuffleLabel{4, Direction::Forward});
    CHECK(L("16R") == ShuffleLabel{16, Direction::Reverse});
    CHECK(L("16R").render() == "16R");
    for (auto bad : {"", "F", "0F", "4X", "-1F", "4f", " 4F", "4FF", "99999999999F"}) {
        CHECK_THROWS_AS(L(bad), Error);
    }

    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::uint32_t> p(1, 100000);
    for (int i = 0; i < 500; ++i) {
        const ShuffleLabel l{p(gen), (i % 2) ? Direction::Reverse : Direction::Forward};
        CHECK(ShuffleLabel::parse(l.render()) == l);
    }
}

TEST_CASE("apply_shuffle_step examples") {
    CHECK(apply_shuffle_step("3Mo&(E", "vX#", L("4F")) == "3MovX#&(E");
    CHECK(apply_shuffle_step("3MovX#&(E", "z%9CP", L("16R")) == "3MovX#&(EPC9%z");
    CHECK(apply_shuffle_step("abc", "XY", L("1R")) == "YXabc");
    CHECK(apply_shuffle_step("", "Q", L("7F")) == "Q");
}

TEST_CASE("apply_shuffle_step properties") {
    std::mt19937_64 gen(1234);
    std::uniform_int_distribution<std::size_t> len(0, 20);
    std::uniform_int_distribution<std::uint32_t> point(1, 40);
    for (int i = 0; i < 5000; ++i) {
        const std::string text = test::random_printable(gen, len(gen));
        const std::string insert = test::random_printable(gen, 1 + len(gen) % 9);
        const std::uint32_t p = point(gen);
        const std::string fwd = apply_shuffle_step(text, insert, {p, Direction::Forward});
        const std::string rev = apply_shuffle_step(text, insert, {p, Direction::Reverse});

        CHECK(fwd.size() == text.size() + insert.size());
        const std::string reversed(insert.rbegin(), insert.rend());
        CHECK(rev == apply_shuffle_step(text, reversed, {p, Direction::Forward}));
        if (p > text.size() + 1) {
            const auto end = static_cast<std::uint32_t>(text.size() + 1);
            CHECK(fwd == apply_shuffle_step(text, insert, {end, Direction::Forward}));
            CHECK(fwd == text + insert);
        }
    }
}

TEST_CASE("generate_codebook") {
    SUBCASE("every entry satisfies digit == length over printable ASCII") {
        SystemEntropy rng;
        const Codebook book = generate_codebook(rng);
        CHECK(book.complete());
        for (char c : kLoginAlphabet) {
            const CodebookEntry& e = book.at(c);
            CHECK(e.digit >= 1);
            CHECK(e.digit <= 9);
            CHECK(e.converted.size() == static_cast<std::size_t>(e.digit));
            CHECK(std::all_of(e.converted.begin(), e.converted.end(), is_printable));
        }
    }
    SUBCASE("independent draws differ") {
        SystemEntropy rng;
        for (int i = 0; i < 100; ++i) {
            CHECK(generate_codebook(rng) != generate_codebook(rng));
        }
    }
    SUBCASE("a recorded stream replays to the same codebook") {
        const std::vector<std::uint8_t> seed{1, 2, 3, 4};
        ReplayEntropy a(seed);
        ReplayEntropy b(seed);
        CHECK(generate_codebook(a) == generate_codebook(b));
    }
    SUBCASE("encoded codebook replays exactly") {
        const Codebook book = fixtures::codebook_with(fixtures::fig1_entries());
        ReplayEntropy rng(fixtures::encode_codebook(book), ReplayEntropy::Exhaustion::Fail);
        CHECK(generate_codebook(rng) == book);
    }
    SUBCASE("entropy failure is reported") {
        ReplayEntropy rng({1, 2, 3}, ReplayEntropy::Exhaustion::Fail);
        try {
            generate_codebook(rng);
            FAIL("expected entropy failure");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::EntropyFailure);
        }
    }
    SUBCASE("digit distribution is roughly uniform") {
        ReplayEntropy rng({42});
        std::array<int, 10> counts{};
        for (int i = 0; i < 200; ++i) {
            const Codebook book = generate_codebook(rng);
            for (char c : kLoginAlphabet) {
                ++counts[static_cast<std::size_t>(book.at(c).digit)];
            }
        }
        // 7200 draws over 9 values: expectation 800 each.
        for (int d = 1; d <= 9; ++d) {
            CHECK(counts[static_cast<std::size_t>(d)] > 650);
            CHECK(counts[static_cast<std::size_t>(d)] < 950);
        }
    }
}

TEST_CASE("codebook rejects entries violating invariants") {
    Codebook book;
    CHECK_THROWS_AS(book.set('a', {3, "ab"}), Error);
    CHECK_THROWS_AS(book.set('a', {0, ""}), Error);
    CHECK_THROWS_AS(book.set('a', {10, "abcdefghij"}), Error);
    CHECK_THROWS_AS(book.set('a', {2, "a "}), Error);
    CHECK_THROWS_AS(book.set('A', {1, "x"}), Error);
    CHECK_FALSE(book.complete());
}

TEST_CASE("build_matrix") {
    const Codebook book = fixtures::codebook_with(fixtures::fig1_entries());

    SUBCASE("worked dp7a3k matrix") {
        const Matrix m = build_matrix("dp7a3k", book, fixtures::fig1_labels());
        REQUIRE(m.size() == 6);
        const char* strings[] = {"3Mo&(E", "vX#", "z%9CP", "?G", "d$L", "Q"};
        const int digits[] = {6, 3, 5, 2, 3, 1};
        const char* labels[] = {"", "4F", "16R", "13F", "13R", "5F"};
        for (std::size_t i = 1; i <= 6; ++i) {
            CHECK(m.row(i).login_char == "dp7a3k"[i - 1]);
            CHECK(m.row(i).digit == digits[i - 1]);
            CHECK(m.row(i).converted == strings[i - 1]);
            CHECK((m.row(i).label ? m.row(i).label->render() : std::string()) == labels[i - 1]);
        }
    }
    SUBCASE("single character") {
        const Matrix m = build_matrix("k", book, std::vector<ShuffleLabel>{});
        CHECK(m.size() == 1);
        CHECK_FALSE(m.row(1).label.has_value());
    }
    SUBCASE("errors") {
        try {
            build_matrix("dp7A3k", book, fixtures::fig1_labels());
            FAIL("expected INVALID_CHARACTER");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidCharacter);
        }
        try {
            build_matrix("dp7a3k", book, std::vector<ShuffleLabel>{L("4F")});
            FAIL("expected LABEL_COUNT_MISMATCH");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::LabelCountMismatch);
        }
        CHECK_THROWS_AS(build_matrix("", book, std::vector<ShuffleLabel>{}), Error);
    }
    SUBCASE("registration draws labels in 1..24") {
        SystemEntropy rng;
        for (int i = 0; i < 200; ++i) {
            const Matrix m = build_matrix("abcdefghij", book, rng);
            for (const ShuffleLabel& l : m.labels()) {
                CHECK(l.point >= 1);
                CHECK(l.point <= kMaxDrawnLabelPoint);
            }
        }
    }
}

TEST_CASE("compose_authentication_password") {
    CHECK(compose_authentication_password(fixtures::fig1_matrix()) == fixtures::kFig1Ap);

    const Codebook book = fixtures::codebook_with(fixtures::fig1_entries());
    CHECK(compose_authentication_password(build_matrix("k", book, std::vector<ShuffleLabel>{})) == "Q");

    SUBCASE("matches the list-splice oracle and the structural invariants") {
        std::mt19937_64 gen(20240601);
        for (int i = 0; i < 2000; ++i) {
            const auto rm = test::random_matrix(gen, 6, 4);
            const std::string ap = compose_authentication_password(rm.matrix);
            CHECK(ap == test::list_splice_compose(rm.oracle));

            std::size_t digit_sum = 0;
            std::string pooled;
            for (const MatrixRow& r : rm.matrix.rows()) {
                digit_sum += static_cast<std::size_t>(r.digit);
                pooled += r.converted;
            }
            CHECK(ap.size() == digit_sum);
            std::string sorted_ap = ap;
            std::sort(sorted_ap.begin(), sorted_ap.end());
            std::sort(pooled.begin(), pooled.end());
            CHECK(sorted_ap == pooled);
        }
    }
}

TEST_CASE("oracle sanity: the list-splice oracle reproduces the worked AP") {
    const std::vector<OracleRow> rows{{"3Mo&(E"}, {"vX#", 4, false}, {"z%9CP", 16, true},
                                      {"?G", 13, false}, {"d$L", 13, true}, {"Q", 5, false}};
    CHECK(test::list_splice_compose(rows) == fixtures::kFig1Ap);
}

TEST_CASE("draw_selection_plan") {
    SystemEntropy rng;
    SUBCASE("bounds, size and STRING coverage") {
        for (int i = 0; i < 1000; ++i) {
            const SelectionPlan plan = draw_selection_plan(rng, 7);
            CHECK(plan.cells.size() >= kMinPlanCells);
            CHECK(plan.cells.size() <= kMaxPlanCells);
            std::set<Cell> distinct(plan.cells.begin(), plan.cells.end());
            CHECK(distinct.size() == plan.cells.size());
            bool has_string = false;
            for (const Cell& c : plan.cells) {
                CHECK(c.row >= 1);
                CHECK(c.row <= 7);
                CHECK_FALSE((c.row == 1 && c.column == Column::Label));
                has_string = has_string || c.column == Column::String;
            }
            CHECK(has_string);
        }
    }
    SUBCASE("plans vary") {
        std::set<std::vector<Cell>> seen;
        for (int i = 0; i < 1000; ++i) {
            seen.insert(draw_selection_plan(rng, 7).cells);
        }
        CHECK(seen.size() >= 2);
    }
    SUBCASE("one-row matrix uses all three non-empty cells") {
        const SelectionPlan plan = draw_selection_plan(rng, 1);
        CHECK(plan.cells.size() == 3);
    }
    SUBCASE("zero rows is rejected") { CHECK_THROWS_AS(draw_selection_plan(rng, 0), Error); }
}

TEST_CASE("extract_identifier") {
    CHECK(extract_identifier(fixtures::fig2_matrix(), fixtures::fig2_plan()) == fixtures::kFig2Identifier);

    const Matrix fig1 = fixtures::fig1_matrix();
    CHECK(extract_identifier(fig1, SelectionPlan{{{1, Column::LoginChar}}}) == "d");
    CHECK(extract_identifier(fig1, SelectionPlan{{{3, Column::Label}, {3, Column::Digit}}}) == "16R5");

    const SelectionPlan plan{{{2, Column::String}, {6, Column::Label}, {1, Column::Digit}}};
    const std::string first = extract_identifier(fig1, plan);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(extract_identifier(fig1, plan) == first);
    }

    try {
        extract_identifier(fig1, SelectionPlan{{{7, Column::String}}});
        FAIL("expected PLAN_OUT_OF_BOUNDS");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PlanOutOfBounds);
    }
}

TEST_CASE("render_matrix is tab separated with an empty first label") {
    const std::string text = render_matrix(fixtures::fig1_matrix());
    CHECK(text.rfind("d\t6\t3Mo&(E\t\n", 0) == 0);
    CHECK(text.find("p\t3\tvX#\t4F\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
