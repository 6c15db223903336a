#include "growbatch/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace growbatch {

const char* const kTraceCsvHeader =
    "k,batch_size,cum_evals,eff_passes,f_sampled,f_true,gap,grad_norm,step,"
    "ls_evals,pair_accepted";

void Trace::write_csv(std::ostream& out) const {
  out << kTraceCsvHeader << '\n';
  char buf[512];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%" PRId64 ",%" PRId64 ",%" PRId64
                  ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d",
                  r.k, r.batch_size, r.cum_evals, r.eff_passes, r.f_sampled,
                  r.f_true, r.gap, r.grad_norm, r.step, r.ls_evals,
                  r.pair_accepted);
    out << buf << '\n';
  }
}

std::string Trace::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

}  // namespace growbatch
