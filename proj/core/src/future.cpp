#include "dflow/future.hpp"

namespace dflow {

FileRef DataFuture::result() const {
    Outcome o = slot_->wait();
    if (!o.ok())
        throw TaskError("output of task " + std::to_string(producer_.value) + ": " +
                            o.to_display_string(),
                        o.get_error());
    return o.get_value().as<FileRef>();
}

Outcome AppFuture::outcome_within(std::chrono::nanoseconds timeout) const {
    if (auto o = slot_->wait_for(timeout)) return *o;
    return Outcome::error(ErrorKind::timeout,
                          "task " + std::to_string(task_.value) + " still running");
}

ArgValue AppFuture::result() const {
    Outcome o = slot_->wait();
    if (!o.ok())
        throw TaskError(
            "task " + std::to_string(task_.value) + " failed: " + o.to_display_string(),
            o.get_error());
    return o.get_value();
}

}  // namespace dflow
