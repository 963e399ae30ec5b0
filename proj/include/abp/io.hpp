// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abp/field.hpp"
#include "abp/kernels.hpp"
#include "abp/norms.hpp"
#include "abp/stochastic.hpp"
#include "abp/verify.hpp"

namespace abp {

/// Shortest round-trip decimal formatting; fixed format keeps outputs
/// byte-identical across runs.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_field_csv(const ScalarField& f, std::ostream& os) {
    const GridDomain& dom = f.domain();
    const bool d3 = dom.dim() == 3;
    os << (d3 ? "ix,iy,iz,x,y,z,class,value\n" : "ix,iy,x,y,class,value\n");
    auto row = [&](GridIndex gi, const char* cls, double v) {
        Vec c = dom.cell_center(gi);
        os << gi.i << ',' << gi.j;
        if (d3) os << ',' << gi.k;
        os << ',' << fmt(c.x) << ',' << fmt(c.y);
        if (d3) os << ',' << fmt(c.z);
        os << ',' << cls << ',' << fmt(v) << '\n';
    };
    const auto& ic = dom.interior_cells();
    for (std::size_t c = 0; c < ic.size(); ++c) row(ic[c], "interior", f.interior_values()[c]);
    const auto& bc = dom.boundary_cells();
    for (std::size_t c = 0; c < bc.size(); ++c) row(bc[c], "boundary", f.boundary_values()[c]);
}

inline void write_rearrangement_csv(const StepFunction& sf, std::ostream& os) {
    os << "value,measure,cumulative_measure\n";
    double cum = 0;
    for (const auto& p : sf.plateaus) {
        cum += p.measure;
        os << fmt(p.value) << ',' << fmt(p.measure) << ',' << fmt(cum) << '\n';
    }
}

inline void write_lemma_csv(const std::vector<LemmaBound>& rows, std::ostream& os) {
    os << "a,lhs,rhs,ratio\n";
    for (const auto& r : rows)
        os << fmt(r.a) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.ratio) << '\n';
}

inline void write_histogram_csv(const ExitHistogram& h, std::ostream& os) {
    os << "t_bin,count\n";
    const double w = h.t_max / double(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << fmt(b * w) << ',' << h.counts[b] << '\n';
}

inline void write_reports_csv(const std::vector<InequalityReport>& reports, std::ostream& os) {
    os << "theorem,domain,function,h,lhs_interior_sup,boundary_sup,functional_value,"
          "implied_constant\n";
    for (const auto& r : reports)
        os << r.theorem_tag << ',' << r.domain_descriptor.at("shape").get<std::string>() << ','
           << r.function_descriptor.at("name").get<std::string>() << ',' << fmt(r.h) << ','
           << fmt(r.lhs_interior_sup) << ',' << fmt(r.boundary_sup) << ','
           << fmt(r.functional_value) << ',' << fmt(r.implied_constant) << '\n';
}

inline void write_sharpness_csv(const std::vector<SharpnessRecord>& recs, std::ostream& os) {
    os << "epsilon,sup_u,l1_lap,log_kernel,ratio_l1,ratio_kernel\n";
    for (const auto& r : recs)
        os << fmt(r.epsilon) << ',' << fmt(r.sup_u) << ',' << fmt(r.l1_lap) << ','
           << fmt(r.log_kernel) << ',' << fmt(r.ratio_l1) << ',' << fmt(r.ratio_kernel) << '\n';
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

template <class WriteFn>
void write_csv_file(const std::filesystem::path& path, WriteFn&& fn) {
    std::ostringstream ss;
    fn(ss);
    write_text_file(path, ss.str());
}

}  // namespace abp
