"""Gate-level GCD datapaths: netlists, carry-out lookahead, SAD block, machines, costs."""
