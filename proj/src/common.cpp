#include "twinspace/common.hpp"
#include "twinspace/error.hpp"

namespace twinspace {

void check_cancel(const JobControl* ctl)
{
    if (ctl && ctl->cancel.load(std::memory_order_relaxed)) {
        throw Cancelled();
    }
}

void report_progress(JobControl* ctl, double fraction)
{
    if (ctl) {
        ctl->progress.store(fraction, std::memory_order_relaxed);
    }
}

} // namespace twinspace
