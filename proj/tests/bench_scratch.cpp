#include <chrono>
#include <cstdio>

#include "treestrat/editdist.hpp"
#include "treestrat/pipeline.hpp"

#include "../src/editdist_instr_hook.hpp"

using namespace treestrat;

int main() {
    const auto sim = simulate_clouds(20240801);
    std::vector<MergeTree> trees;
    for (const auto& c : sim.clouds) trees.push_back(build_dendrogram(c, Linkage::average));
    double scale = 1.0;
    auto scaled = rescale_heights(trees, RescaleMode::population, &scale);
    std::vector<int> order(100);
    for (int i = 0; i < 100; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scaled[a].leaf_count() < scaled[b].leaf_count(); });
    int a = -1, b = -1;
    for (int i = 0; i < 100; ++i)
        if (scaled[order[i]].leaf_count() == 20) { if (a < 0) a = order[i]; else if (b < 0) b = order[i]; }
    auto t0 = std::chrono::steady_clock::now();
    auto [d, calls, states] = instrumented_edit_distance(scaled[a], scaled[b]);
    auto t1 = std::chrono::steady_clock::now();
    std::printf("d=%.6f  %.2f s  fcalls=%ld  fstates=%ld\n", d,
                std::chrono::duration<double>(t1 - t0).count(), calls, states);
    return 0;
}
