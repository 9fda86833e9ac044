// populated once the core API is final
