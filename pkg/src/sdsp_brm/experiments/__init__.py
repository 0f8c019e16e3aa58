"""Study runners and report emitters."""
