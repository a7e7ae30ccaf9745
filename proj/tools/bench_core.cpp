// Benchmark: serial reference enumeration vs the OpenMP partition scheduler.
// The two paths must agree graph for graph; this reports counts and wall
// times side by side over growing bounds.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "discrep/enumerate.hpp"
#include "discrep/harness.hpp"
#include "discrep/parallel.hpp"

using namespace discrep;
using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
    int workers = hardware_threads();
    std::printf("workers=%d\n", workers);
    std::printf("%-34s %12s %10s %10s %8s\n", "spec", "count", "serial_s", "omp_s",
                "match");

    bool all_match = true;
    struct Case {
        std::string name;
        EnumerationSpec spec;
    };
    std::vector<Case> cases;

    {
        EnumerationSpec s;
        s.max_vertices = 5;
        s.max_weight = 4;
        cases.push_back({"any n<=5 w<=4", s});
    }
    {
        EnumerationSpec s;
        s.max_vertices = 4;
        s.max_weight = 4;
        s.coeffs = {Rational(1, 2), Rational(1)};
        s.max_externals = 2;
        cases.push_back({"any n<=4 w<=4 ext<=2", s});
    }
    {
        EnumerationSpec s;
        s.max_vertices = 6;
        s.max_weight = 4;
        s.elliptic_only = true;
        s.minimal_only = true;
        cases.push_back({"elliptic minimal n<=6 w<=4", s});
    }
    {
        EnumerationSpec s;
        s.max_vertices = 10;
        s.max_weight = 5;
        s.shape = Shape::Chain;
        s.elliptic_only = true;
        cases.push_back({"chain elliptic n<=10 w<=5", s});
    }

    for (Case& c : cases) {
        c.spec.threads = 0;
        auto t0 = Clock::now();
        long long serial = enumerate_count(c.spec);
        double serial_s = seconds_since(t0);

        c.spec.threads = workers;
        t0 = Clock::now();
        long long parallel = enumerate_count(c.spec);
        double parallel_s = seconds_since(t0);

        bool match = serial == parallel;
        all_match = all_match && match;
        std::printf("%-34s %12lld %10.3f %10.3f %8s\n", c.name.c_str(), serial,
                    serial_s, parallel_s, match ? "yes" : "NO");
    }

    // The spectrum pipeline is the heaviest consumer; time it at one scale.
    {
        EnumerationSpec s;
        s.max_vertices = 8;
        s.max_weight = 4;
        s.shape = Shape::Chain;
        s.minimal_only = true;

        s.threads = 0;
        auto t0 = Clock::now();
        PLDSet serial = pld_spectrum(s);
        double serial_s = seconds_since(t0);

        s.threads = workers;
        t0 = Clock::now();
        PLDSet parallel = pld_spectrum(s);
        double parallel_s = seconds_since(t0);

        bool match = serial.total_graphs == parallel.total_graphs &&
                     serial.entries.size() == parallel.entries.size();
        for (size_t i = 0; match && i < serial.entries.size(); i++)
            match = serial.entries[i].value == parallel.entries[i].value &&
                    serial.entries[i].generators == parallel.entries[i].generators;
        all_match = all_match && match;
        std::printf("%-34s %12lld %10.3f %10.3f %8s\n", "spectrum chain n<=8 w<=4",
                    serial.total_graphs, serial_s, parallel_s, match ? "yes" : "NO");
    }

    std::printf("all_match=%s\n", all_match ? "true" : "false");
    return all_match ? 0 : 1;
}
