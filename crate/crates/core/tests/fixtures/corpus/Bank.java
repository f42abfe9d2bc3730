package bank;

import java.util.HashMap;
import java.util.Map;

public class Bank {
    private final Map<String, Account> accounts = new HashMap<>();
    private final Ledger ledger = new Ledger();

    public Account open(String owner) {
        Account a = new Account(owner, ledger);
        accounts.put(owner, a);
        return a;
    }

    public void transfer(String from, String to, long amount) {
        accounts.get(from).withdraw(amount);
        accounts.get(to).deposit(amount);
    }

    public int transactions() {
        return ledger.size();
    }
}
