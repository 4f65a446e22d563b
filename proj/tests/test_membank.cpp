// Memory bank: storage discipline, retrieval views, drift sequence,
// positional table, and the access log that later proves rollout causality.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "dcb/errors.hpp"
#include "dcb/memory_bank.hpp"
#include "dcb/ops.hpp"
#include "dcb/tape.hpp"

using namespace dcb;

namespace {
Tensor latent2x2(double a, double b, double c, double d) {
    return Tensor({2, 2}, {a, b, c, d});
}
}  // namespace

TEST_CASE("write appends and size tracks") {
    MemoryBank bank(4, 2);
    CHECK(bank.empty());
    CHECK(bank.capacity() == 4);
    bank.write(latent2x2(1, 2, 3, 4), 1);
    bank.write(latent2x2(5, 6, 7, 8), 2);
    CHECK(bank.size() == 2);
    CHECK_FALSE(bank.empty());
    CHECK(bank.entry(0).rollout_index == 1);
    CHECK(bank.entry(1).rollout_index == 2);
    CHECK(bank.entry(1).latent(0, 1) == 6.0);
}

TEST_CASE("rollout indices must strictly increase") {
    MemoryBank bank(4, 2);
    bank.write(latent2x2(1, 1, 1, 1), 3);
    CHECK_THROWS_AS(bank.write(latent2x2(2, 2, 2, 2), 3), ContractError);
    CHECK_THROWS_AS(bank.write(latent2x2(2, 2, 2, 2), 1), ContractError);
    CHECK_THROWS_AS(bank.write(latent2x2(2, 2, 2, 2), -1), ContractError);
    bank.write(latent2x2(2, 2, 2, 2), 4);
    CHECK(bank.size() == 2);
}

TEST_CASE("capacity overflow is a hard error") {
    MemoryBank bank(2, 2);
    bank.write(latent2x2(1, 1, 1, 1), 1);
    bank.write(latent2x2(2, 2, 2, 2), 2);
    CHECK_THROWS_AS(bank.write(latent2x2(3, 3, 3, 3), 3), CapacityError);
    CHECK(bank.size() == 2);  // failed write leaves the bank unchanged
}

TEST_CASE("shape discipline on writes") {
    MemoryBank bank(4, 2);
    bank.write(latent2x2(1, 1, 1, 1), 1);
    CHECK_THROWS_AS(bank.write(Tensor({2, 3}), 2), DimensionError);
    CHECK_THROWS_AS(bank.write(Tensor({2}), 2), DimensionError);
    CHECK_THROWS_AS(bank.write(Tensor({3, 2}), 2), DimensionError);  // token count changed
}

TEST_CASE("empty bank reads") {
    MemoryBank bank(4, 2);
    CHECK_THROWS_AS(bank.view_with_pos(), EmptyMemoryError);
    CHECK_THROWS_AS(bank.drift_sequence(), EmptyMemoryError);
    Tensor prior = latent2x2(9, 9, 9, 9);
    Tensor ref = bank.reference(prior);
    CHECK(max_abs_diff(ref, prior) == 0.0);  // falls back to the caller's prior
}

TEST_CASE("reference returns the most recent raw latent") {
    MemoryBank bank(4, 2);
    bank.write(latent2x2(1, 2, 3, 4), 1);
    bank.write(latent2x2(5, 6, 7, 8), 2);
    Tensor ref = bank.reference(latent2x2(0, 0, 0, 0));
    CHECK(max_abs_diff(ref, latent2x2(5, 6, 7, 8)) == 0.0);
}

TEST_CASE("zero positional table leaves the view raw") {
    MemoryBank bank(4, 2);
    Tensor a = latent2x2(1, 2, 3, 4);
    Tensor b = latent2x2(5, 6, 7, 8);
    bank.write(a, 1);
    bank.write(b, 2);
    LatentStack view = bank.view_with_pos();
    REQUIRE(view.size() == 2);
    CHECK(max_abs_diff(view[0], a) == 0.0);
    CHECK(max_abs_diff(view[1], b) == 0.0);
}

TEST_CASE("positional rows are added per slot, broadcast over tokens") {
    Tensor table({3, 2}, {10, 20, 30, 40, 50, 60});
    MemoryBank bank(table);
    bank.write(latent2x2(1, 2, 3, 4), 1);
    bank.write(latent2x2(5, 6, 7, 8), 2);
    LatentStack view = bank.view_with_pos();
    // slot 0 uses table row 0 = (10, 20) on both tokens
    CHECK(max_abs_diff(view[0], latent2x2(11, 22, 13, 24)) == 0.0);
    // slot 1 uses table row 1 = (30, 40)
    CHECK(max_abs_diff(view[1], latent2x2(35, 46, 37, 48)) == 0.0);
    // stored entries stay raw
    CHECK(max_abs_diff(bank.entry(0).latent, latent2x2(1, 2, 3, 4)) == 0.0);
}

TEST_CASE("drift sequence is padded differences of the positional view") {
    Tensor table({3, 2}, {1, 1, 2, 2, 3, 3});
    MemoryBank bank(table);
    bank.write(latent2x2(1, 2, 3, 4), 1);
    bank.write(latent2x2(5, 6, 7, 8), 2);
    LatentStack drift = bank.drift_sequence();
    REQUIRE(drift.size() == 2);
    CHECK(max_abs_diff(drift[0], Tensor::zeros({2, 2})) == 0.0);
    // view[1] - view[0] = (5+2, 6+2, 7+2, 8+2) - (1+1, 2+1, 3+1, 4+1)
    CHECK(max_abs_diff(drift[1], latent2x2(5, 5, 5, 5)) == 0.0);
}

TEST_CASE("clear empties entries but keeps the table and capacity") {
    Tensor table({2, 2}, {1, 2, 3, 4});
    MemoryBank bank(table);
    bank.write(latent2x2(1, 1, 1, 1), 1);
    bank.clear();
    CHECK(bank.empty());
    CHECK(bank.capacity() == 2);
    CHECK(max_abs_diff(bank.pos_table(), table) == 0.0);
    bank.write(latent2x2(2, 2, 2, 2), 0);  // indices restart after clear
    CHECK(bank.size() == 1);
}

TEST_CASE("set_pos_table rejects extent changes") {
    MemoryBank bank(3, 2);
    CHECK_THROWS_AS(bank.set_pos_table(Tensor({2, 2})), DimensionError);
    CHECK_THROWS_AS(bank.set_pos_table(Tensor({3, 4})), DimensionError);
    CHECK_NOTHROW(bank.set_pos_table(Tensor({3, 2})));
}

TEST_CASE("access log records op, tag, and touched indices") {
    MemoryBank bank(4, 2);
    bank.write(latent2x2(1, 1, 1, 1), 0);
    bank.write(latent2x2(2, 2, 2, 2), 1);

    bank.set_access_tag(2);
    (void)bank.reference(latent2x2(0, 0, 0, 0));
    (void)bank.view_with_pos();
    (void)bank.drift_sequence();

    const auto& log = bank.access_log();
    REQUIRE(log.size() == 3);
    CHECK(log[0].op == "reference");
    CHECK(log[0].step_tag == 2);
    CHECK(log[0].rollout_indices == std::vector<int>{1});
    CHECK(log[1].op == "view_with_pos");
    CHECK(log[1].rollout_indices == std::vector<int>{0, 1});
    CHECK(log[2].op == "drift_sequence");
    CHECK(log[2].rollout_indices == std::vector<int>{0, 1});

    bank.clear_access_log();
    CHECK(bank.access_log().empty());
}

TEST_CASE("every logged read precedes the tagged step") {
    MemoryBank bank(8, 2);
    for (int r = 0; r < 6; ++r) {
        bank.set_access_tag(r);
        (void)bank.reference(latent2x2(0, 0, 0, 0));
        if (!bank.empty()) {
            (void)bank.view_with_pos();
            (void)bank.drift_sequence();
        }
        bank.write(latent2x2(r, r, r, r), r);
    }
    for (const MemoryAccess& a : bank.access_log()) {
        for (int idx : a.rollout_indices) CHECK(idx < a.step_tag);
    }
}

TEST_CASE("view and drift are differentiable through latents and table") {
    Tape tape;
    TapeScope scope(tape);
    Tensor table = tape.watch(Tensor({2, 2}, {0.1, 0.2, 0.3, 0.4}));
    Tensor a = tape.watch(latent2x2(1, 2, 3, 4));
    Tensor b = tape.watch(latent2x2(2, 3, 4, 5));

    MemoryBank bank(table);
    bank.write(a, 0);
    bank.write(b, 1);

    LatentStack drift = bank.drift_sequence();
    Tensor loss = sum_all(square(drift[1]));
    Gradients g = tape.backward(loss);

    // drift[1] = (b + row1) - (a + row0); d loss / d a = -2 * drift[1]
    Tensor d1 = drift[1];
    Tensor ga = g.of(a);
    Tensor gb = g.of(b);
    for (long long i = 0; i < 4; ++i) {
        CHECK(ga.at_flat(i) == doctest::Approx(-2.0 * d1.at_flat(i)).epsilon(1e-12));
        CHECK(gb.at_flat(i) == doctest::Approx(2.0 * d1.at_flat(i)).epsilon(1e-12));
    }
    // table row 0 gets -2 * column sums of drift[1], row 1 the positive
    Tensor gt = g.of(table);
    CHECK(gt(0, 0) == doctest::Approx(-2.0 * (d1(0, 0) + d1(1, 0))).epsilon(1e-12));
    CHECK(gt(1, 1) == doctest::Approx(2.0 * (d1(0, 1) + d1(1, 1))).epsilon(1e-12));
}

TEST_CASE("pos_table constructor fixes capacity to the row count") {
    Tensor table({5, 3});
    MemoryBank bank(table);
    CHECK(bank.capacity() == 5);
    CHECK_THROWS_AS(MemoryBank(Tensor({4})), DimensionError);
}
