#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "randsplit/decomposition.hpp"

using namespace randsplit;

namespace {

void check_rect(const Rect& r, double ax, double bx, double ay, double by, double tol) {
    CHECK(std::abs(r.ax - ax) <= tol);
    CHECK(std::abs(r.bx - bx) <= tol);
    CHECK(std::abs(r.ay - ay) <= tol);
    CHECK(std::abs(r.by - by) <= tol);
}

}  // namespace

TEST_CASE("paper_compat 3x3 rectangles") {
    const auto subs = build_subdomains(3, 3, 0.2, SplitMode::PaperCompat);
    REQUIRE(subs.size() == 9);
    check_rect(subs[0].rect, -1, -0.267, -1, -0.267, 5e-4);
    check_rect(subs[1].rect, -0.467, 0.467, -1, -0.267, 5e-4);
    check_rect(subs[4].rect, -0.467, 0.467, -0.467, 0.467, 5e-4);
    check_rect(subs[8].rect, 0.267, 1, 0.267, 1, 5e-4);
    for (int l = 0; l < 9; ++l) CHECK(subs[l].index == l);
}

TEST_CASE("single subdomain and symmetric split") {
    const auto one = build_subdomains(1, 1, 0.2, SplitMode::Symmetric);
    REQUIRE(one.size() == 1);
    check_rect(one[0].rect, -1, 1, -1, 1, 0.0);

    const auto two = build_subdomains(2, 1, 0.2, SplitMode::Symmetric);
    check_rect(two[0].rect, -1, 0.1, -1, 1, 1e-15);
    check_rect(two[1].rect, -0.1, 1, -1, 1, 1e-15);
}

TEST_CASE("build_subdomains rejects bad parameters") {
    CHECK_THROWS_AS(build_subdomains(0, 1, 0.2, SplitMode::Symmetric), std::invalid_argument);
    CHECK_THROWS_AS(build_subdomains(2, 1, -0.1, SplitMode::Symmetric), std::invalid_argument);
    CHECK_THROWS_AS(build_subdomains(4, 1, 0.5, SplitMode::Symmetric), std::invalid_argument);
    CHECK_NOTHROW(build_subdomains(4, 1, 0.49, SplitMode::Symmetric));
}

TEST_CASE("partition of unity examples") {
    const Grid2D g = build_grid(21, 21, Rect{});
    const Decomposition single(1, 1, 0.2, SplitMode::Symmetric);
    for (double v : build_partition_of_unity(single, g)[0].values()) CHECK(v == 1.0);

    const Decomposition two(2, 1, 0.2, SplitMode::Symmetric);
    CHECK(two.chi(0, 0.0, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two.chi(1, 0.0, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
    const auto chi = build_partition_of_unity(two, g);
    int in_band = 0;
    for (int j = 0; j + 1 < g.ny(); ++j)
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double x = g.cell_x(i);
            if (x > -0.1 && x < 0.1) {
                ++in_band;
                const std::size_t c = g.cell_index(i, j);
                CHECK(chi[0](c) > 0.0);
                CHECK(chi[0](c) < 1.0);
                CHECK(chi[0](c) + chi[1](c) == doctest::Approx(1.0).epsilon(1e-15));
            }
        }
    CHECK(in_band > 0);
}

TEST_CASE("partition of unity invariants over many layouts") {
    const Grid2D g = build_grid(41, 41, Rect{});
    for (SplitMode mode : {SplitMode::Symmetric, SplitMode::PaperCompat})
        for (int mx : {1, 2, 3, 4, 5})
            for (int my : {1, 3, 4})
                for (double overlap : {0.0, 0.1, 0.2, 0.3}) {
                    if (overlap >= 2.0 / std::max(mx, my)) continue;
                    const Decomposition dec(mx, my, overlap, mode);
                    const auto chi = build_partition_of_unity(dec, g);
                    const auto node_chi = node_partition_of_unity(dec, g);
                    double worst = 0.0;
                    int bad_support = 0;
                    for (int j = 0; j + 1 < g.ny(); ++j)
                        for (int i = 0; i + 1 < g.nx(); ++i) {
                            const std::size_t c = g.cell_index(i, j);
                            double sum = 0.0;
                            for (int l = 0; l < dec.size(); ++l) {
                                sum += chi[l](c);
                                const Rect& r = dec.subdomains()[l].rect;
                                const double x = g.cell_x(i), y = g.cell_y(j);
                                if (!r.contains(x, y) && chi[l](c) != 0.0) ++bad_support;
                                if (x > r.ax && x < r.bx && y > r.ay && y < r.by && !(chi[l](c) > 0.0)) ++bad_support;
                            }
                            worst = std::max(worst, std::abs(sum - 1.0));
                        }
                    for (std::size_t k = 0; k < g.node_count(); ++k) {
                        double sum = 0.0;
                        for (int l = 0; l < dec.size(); ++l) sum += node_chi[l][k];
                        worst = std::max(worst, std::abs(sum - 1.0));
                    }
                    CHECK(worst <= 1e-12);
                    CHECK(bad_support == 0);
                }
}

TEST_CASE("tau closed forms") {
    for (double t : tau_uniform_single(9).tau) CHECK(t == doctest::Approx(1.0 / 9));
    CHECK(tau_uniform_single(1).tau[0] == 1.0);
    CHECK(tau_uniform_k(1, 4).tau[0] == 1.0);

    // Enumerate the 9 ordered draws of k = 2 from s = 3.
    int hits = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) hits += (a == 0 || b == 0);
    for (double t : tau_uniform_k(3, 2).tau) CHECK(t == doctest::Approx(hits / 9.0).epsilon(1e-15));
    CHECK(hits / 9.0 == doctest::Approx(5.0 / 9.0));

    const BatchWeights pred = tau_predictor(4, {1, 3}, 0.1);
    CHECK(pred.tau[0] == doctest::Approx(0.1));
    CHECK(pred.tau[1] == doctest::Approx(0.9));
    CHECK(pred.tau[3] == doctest::Approx(0.9));
    CHECK_THROWS_AS(tau_predictor(3, {0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tau_uniform_k(3, 0), std::invalid_argument);
}

TEST_CASE("split mode names") {
    CHECK(parse_split_mode("symmetric") == SplitMode::Symmetric);
    CHECK(to_string(parse_split_mode("paper_compat")) == "paper_compat");
    CHECK_THROWS_AS(parse_split_mode("other"), std::invalid_argument);
}
