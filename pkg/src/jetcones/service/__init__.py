"""HTTP front end and shared request handling."""
