#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <resilab/scanner.hpp>

#include "oracles.hpp"

using resilab::CheckSet;
using resilab::ChunkResult;
using resilab::Int;
using resilab::ScanConfig;
using resilab::ScanReport;

namespace {

std::string temp_path(const std::string& tag) {
    return "scanner_test_" + tag + "_" + std::to_string(::getpid()) + ".tmp";
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("scan_chunk basics") {
    const ChunkResult r = resilab::scan_chunk(1, 100, CheckSet::all());
    CHECK(r.count_checked == 100);
    CHECK(r.violations.empty());
    REQUIRE(r.max_residue.has_value());
    // Brute-force oracle: the max residue over [1,100] sits at N=9,
    // Res(9) = 2^13/(3^6*9) = 8192/6561 = 1.2485..., ahead of Res(27) = 1.1988...
    CHECK(oracle::naive_max_residue_arg(1, 100) == 9);
    CHECK(r.max_residue->n == 9);
    CHECK(r.max_residue->res == resilab::residue_of(9));
    CHECK(r.max_residue->res.value() == resilab::make_rat(8192, 6561));
    // Smallest-N tiebreak: 18 = 2*9 has the same residue but larger N.
    CHECK(resilab::residue_compare(resilab::residue_of(18), r.max_residue->res) ==
          std::strong_ordering::equal);
    REQUIRE(r.min_residue.has_value());
    CHECK(r.min_residue->n == 1);
}

TEST_CASE("scan_chunk single values") {
    const ChunkResult r993 = resilab::scan_chunk(993, 993, CheckSet::all());
    REQUIRE(r993.max_residue.has_value());
    CHECK(resilab::residue_decimal(r993.max_residue->res, 9) == "1.253142144");

    const ChunkResult r1024 = resilab::scan_chunk(1024, 1024, CheckSet::all());
    REQUIRE(r1024.max_residue.has_value());
    CHECK(r1024.max_residue->res == resilab::ResidueTriple{0, 0, 1});
    CHECK(r1024.max_residue->res.value() == 1);
}

TEST_CASE("budget exhaustion becomes a violation record") {
    const ChunkResult r = resilab::scan_chunk(6, 7, CheckSet{true, false, false, false, false}, 5);
    CHECK(r.count_checked == 2);
    REQUIRE(r.violations.size() == 2);  // D(6)=8, D(7)=16 both exceed 5
    CHECK(r.violations[0].check == "budget");
    CHECK(r.violations[0].n == 6);
    CHECK(r.violations[1].n == 7);
}

TEST_CASE("merge equals whole-range scan and respects identity") {
    const ChunkResult whole = resilab::scan_chunk(1, 100, CheckSet::all());
    const ChunkResult left = resilab::scan_chunk(1, 50, CheckSet::all());
    const ChunkResult right = resilab::scan_chunk(51, 100, CheckSet::all());

    const ScanReport merged = resilab::merge(left, right);
    const ScanReport direct = resilab::merge(ScanReport{}, whole);
    CHECK(merged.canonical_json() == direct.canonical_json());

    const ScanReport with_empty = resilab::merge(merged, ChunkResult{});
    CHECK(with_empty.canonical_json() == merged.canonical_json());
}

TEST_CASE("merge is order-insensitive over random partitions") {
    std::mt19937_64 rng(99);
    const Int lo = 1, hi = 500;
    const ScanReport reference = resilab::merge(ScanReport{}, resilab::scan_chunk(lo, hi, CheckSet::all()));

    for (int trial = 0; trial < 5; ++trial) {
        // Random partition of [1,500].
        std::vector<ChunkResult> parts;
        Int cursor = lo;
        while (cursor <= hi) {
            Int stop = cursor + Int(rng() % 90);
            if (stop > hi) stop = hi;
            parts.push_back(resilab::scan_chunk(cursor, stop, CheckSet::all()));
            cursor = stop + 1;
        }
        std::shuffle(parts.begin(), parts.end(), rng);
        ScanReport rep;
        for (const auto& p : parts) resilab::absorb(rep, p);
        CHECK(rep.canonical_json() == reference.canonical_json());
        CHECK(rep.contiguous());
    }
}

TEST_CASE("merge rejects overlap") {
    const ChunkResult a = resilab::scan_chunk(1, 50, CheckSet::none());
    const ChunkResult b = resilab::scan_chunk(50, 60, CheckSet::none());
    CHECK_THROWS_AS(resilab::merge(a, b), std::invalid_argument);
}

TEST_CASE("run_scan is deterministic across worker counts and chunk sizes") {
    ScanConfig cfg;
    cfg.start = 1;
    cfg.end = 20000;
    cfg.chunk_size = 512;
    cfg.checks = CheckSet::all();

    cfg.workers = 1;
    const std::string one = resilab::run_scan(cfg).canonical_json();
    cfg.workers = 4;
    const std::string four = resilab::run_scan(cfg).canonical_json();
    cfg.workers = 8;
    cfg.chunk_size = 997;  // different partition must not matter either
    const std::string eight = resilab::run_scan(cfg).canonical_json();

    CHECK(one == four);
    CHECK(one == eight);

    const ScanReport rep = resilab::run_scan(cfg);
    CHECK(rep.count_checked == 20000);
    CHECK(rep.violations.empty());
    CHECK(rep.contiguous());
    REQUIRE(rep.max_residue.has_value());
    CHECK(rep.max_residue->n == 993);
}

TEST_CASE("bounded stats cache does not change results") {
    ScanConfig cfg;
    cfg.start = 1;
    cfg.end = 5000;
    cfg.checks = CheckSet::all();
    const std::string plain = resilab::run_scan(cfg).canonical_json();
    cfg.cache_below = 4096;
    const std::string cached = resilab::run_scan(cfg).canonical_json();
    CHECK(plain == cached);
}

TEST_CASE("checkpoint record schema") {
    const ChunkResult c = resilab::scan_chunk(9, 40, CheckSet::all());
    const auto j = nlohmann::json::parse(resilab::checkpoint_line(c));
    CHECK(j.at("start") == "9");
    CHECK(j.at("end") == "40");
    CHECK(j.at("count") == 32);
    CHECK(j.at("max_res").at("e") == 13);
    CHECK(j.at("max_res").at("o") == 6);
    CHECK(j.at("max_res").at("n_odd") == "9");
    CHECK(j.at("argmax") == "9");
    CHECK(j.at("violations").is_array());
    // Decimal strings, not JSON numbers, for the unbounded integers.
    CHECK(j.at("start").is_string());
    CHECK(j.at("max_res").at("n_odd").is_string());
}

TEST_CASE("checkpoint lines round-trip") {
    const ChunkResult c = resilab::scan_chunk(1, 100, CheckSet::all());
    const std::string line = resilab::checkpoint_line(c);
    CHECK(line.find('\n') == std::string::npos);
    const ChunkResult back = resilab::parse_checkpoint_line(line, 1);
    CHECK(back.chunk_start == c.chunk_start);
    CHECK(back.chunk_end == c.chunk_end);
    CHECK(back.count_checked == c.count_checked);
    REQUIRE(back.max_residue.has_value());
    CHECK(back.max_residue->res == c.max_residue->res);
    CHECK(back.max_residue->n == c.max_residue->n);
    REQUIRE(back.min_residue.has_value());
    CHECK(back.min_residue->n == c.min_residue->n);
}

TEST_CASE("corrupt checkpoint lines abort with the line number") {
    CHECK_THROWS_AS(resilab::parse_checkpoint_line("{not json", 7), resilab::CheckpointError);
    try {
        resilab::parse_checkpoint_line("{\"start\":\"1\"}", 7);
        FAIL("expected CheckpointError");
    } catch (const resilab::CheckpointError& e) {
        CHECK(e.line_no == 7);
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }
}

TEST_CASE("resume from a truncated checkpoint reproduces the full report") {
    FileGuard guard{temp_path("resume")};

    ScanConfig cfg;
    cfg.start = 1;
    cfg.end = 6000;
    cfg.chunk_size = 256;
    cfg.checks = CheckSet::all();
    cfg.workers = 3;
    cfg.checkpoint_path = guard.path;

    const ScanReport full = resilab::run_scan(cfg);
    const auto all_lines = read_lines(guard.path);
    REQUIRE(all_lines.size() == 24);  // 6000/256 chunks

    // Simulate a scan killed after 9 committed chunks: the checkpoint is a
    // prefix of whole lines.
    {
        std::ofstream out(guard.path, std::ios::trunc);
        for (std::size_t i = 0; i < 9; ++i) out << all_lines[i] << '\n';
    }
    const ScanReport resumed = resilab::run_scan(cfg);
    CHECK(resumed.canonical_json() == full.canonical_json());
    CHECK(resumed.chunks_computed == 24 - 9);

    // Re-running a completed scan performs no new chunk work and leaves the
    // checkpoint file untouched.
    const auto lines_before = read_lines(guard.path);
    const ScanReport again = resilab::run_scan(cfg);
    CHECK(again.chunks_computed == 0);
    CHECK(again.canonical_json() == full.canonical_json());
    CHECK(read_lines(guard.path) == lines_before);
}

TEST_CASE("checkpoint records from a different partition are rejected") {
    FileGuard guard{temp_path("mismatch")};
    ScanConfig cfg;
    cfg.start = 1;
    cfg.end = 1000;
    cfg.chunk_size = 100;
    cfg.checkpoint_path = guard.path;
    resilab::run_scan(cfg);

    cfg.chunk_size = 77;  // different partition
    CHECK_THROWS_AS(resilab::run_scan(cfg), resilab::CheckpointError);
}

TEST_CASE("run_scan validates its config") {
    ScanConfig cfg;
    cfg.start = 0;
    cfg.end = 10;
    CHECK_THROWS_AS(resilab::run_scan(cfg), std::invalid_argument);
    cfg.start = 10;
    cfg.end = 9;
    CHECK_THROWS_AS(resilab::run_scan(cfg), std::invalid_argument);
    cfg.end = 20;
    cfg.chunk_size = 0;
    CHECK_THROWS_AS(resilab::run_scan(cfg), std::invalid_argument);
    cfg.chunk_size = 4096;
    cfg.workers = 0;
    CHECK_THROWS_AS(resilab::run_scan(cfg), std::invalid_argument);
}

TEST_CASE("find_max_residue") {
    ScanConfig cfg;
    cfg.checks = CheckSet::none();

    cfg.start = 1;
    cfg.end = 4;
    const auto tiny = resilab::find_max_residue(cfg);
    CHECK(tiny.n == 3);
    CHECK(tiny.res.value() == resilab::make_rat(32, 27));

    cfg.start = 16;
    cfg.end = 16;
    const auto single = resilab::find_max_residue(cfg);
    CHECK(single.n == 16);
    CHECK(single.decimal == "1.000000000000");

    cfg.start = 1;
    cfg.end = 2000;
    const auto two_k = resilab::find_max_residue(cfg);
    CHECK(two_k.n == oracle::naive_max_residue_arg(1, 2000));
    CHECK(two_k.n == 993);
}

TEST_CASE("the 10^20 window stays inside [1, 1.26)") {
    const Int base = resilab::parse_decimal("100000000000000000000");
    ScanConfig cfg;
    cfg.start = base;
    cfg.end = base + 50;
    cfg.checks = CheckSet{true, true, false, false, false};
    const ScanReport rep = resilab::run_scan(cfg);
    CHECK(rep.violations.empty());
    CHECK(rep.residues_in_1_126());
}

TEST_CASE("CSV report rows") {
    FileGuard guard{temp_path("csv")};
    resilab::write_csv_report(guard.path, 6, 8);
    const auto lines = read_lines(guard.path);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "N,D,O,E,residue");
    CHECK(lines[1] == "6,8,2,6,1.185185185185");   // Res(6)=Res(3)=32/27
    CHECK(lines[2] == "7,16,5,11,1.203997648442");  // 2048/1701
    CHECK(lines[3] == "8,3,0,3,1.000000000000");
}
